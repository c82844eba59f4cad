// SPDX-License-Identifier: Apache-2.0
#include "hypokit/rng.hpp"

#include <cmath>
#include <numbers>

#include "hypokit/error.hpp"

namespace hypokit {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

inline double unit_interval(std::uint32_t a, std::uint32_t b) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a) << 32) | b;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<double, 2> RngStream::block(std::uint64_t index) const noexcept {
  const std::array<std::uint32_t, 4> counter{
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  const auto x = philox4x32(counter, key);
  const double u1 = 1.0 - unit_interval(x[0], x[1]);
  const double u2 = unit_interval(x[2], x[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

void RngStream::fill_normal(std::span<double> out) {
  for (double& z : out) {
    const std::uint64_t b = next_draw_ >> 1;
    if (b != cached_block_) {
      cache_ = block(b);
      cached_block_ = b;
    }
    z = cache_[next_draw_ & 1u];
    ++next_draw_;
  }
}

void RngStream::seek(std::uint64_t draw) noexcept { next_draw_ = draw; }

void ZeroNoise::fill_normal(std::span<double> out) {
  for (double& z : out) z = 0.0;
}

FixedNoise::FixedNoise(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::invalid_argument, "fixed noise needs at least one value");
}

void FixedNoise::fill_normal(std::span<double> out) {
  for (double& z : out) {
    z = values_[next_];
    next_ = (next_ + 1) % values_.size();
  }
}

}  // namespace hypokit
