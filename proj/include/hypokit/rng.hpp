// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace hypokit {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Source of standard Gaussian increments for the stochastic integrators.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void fill_normal(std::span<double> out) = 0;
  double normal() {
    double z;
    fill_normal(std::span<double>(&z, 1));
    return z;
  }
};

/// Counter-based Gaussian stream.
///
/// Draw number j (0-based) of stream (seed, stream_id) is fully determined:
///   block b = j / 2, counter = (b_lo, b_hi, stream_lo, stream_hi),
///   key = (seed_lo, seed_hi), (x0, x1, x2, x3) = philox4x32(counter, key),
///   U(a, b) = ((a << 32 | b) >> 11) * 2^-53,
///   u1 = 1 - U(x0, x1), u2 = U(x2, x3), r = sqrt(-2 ln u1),
///   draw 2b = r cos(2 pi u2), draw 2b + 1 = r sin(2 pi u2).
class RngStream final : public NoiseSource {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  void fill_normal(std::span<double> out) override;

  /// Jumps to draw number `draw` without generating the intermediate values.
  void seek(std::uint64_t draw) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t position() const noexcept { return next_draw_; }

 private:
  std::array<double, 2> block(std::uint64_t index) const noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t next_draw_ = 0;
  std::array<double, 2> cache_{};
  std::uint64_t cached_block_ = ~std::uint64_t{0};
};

/// Test hook: every draw is zero.
class ZeroNoise final : public NoiseSource {
 public:
  void fill_normal(std::span<double> out) override;
};

/// Test hook: replays a fixed sequence, cycling when exhausted.
class FixedNoise final : public NoiseSource {
 public:
  explicit FixedNoise(std::vector<double> values);
  void fill_normal(std::span<double> out) override;

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

}  // namespace hypokit
