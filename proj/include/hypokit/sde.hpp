// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hypokit/model.hpp"
#include "hypokit/rng.hpp"

namespace hypokit {

enum class Scheme { langevin, overdamped, hamiltonian };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme) noexcept;

/// One BAOAB step: half kick, half drift, exact Ornstein-Uhlenbeck flow
///   p <- exp(-gamma dt / m) p + sqrt((m / beta)(1 - exp(-2 gamma dt / m))) xi,
/// half drift, half kick. Consumes d Gaussian draws.
PhaseState step_langevin(const PhaseState& s, const PotentialSpec& spec,
                         const EnsembleParams& params, double dt, NoiseSource& noise);

/// Euler-Maruyama for dq = -grad V dt + sqrt(2 / beta) dB. p is carried along
/// unchanged.
PhaseState step_overdamped(const PhaseState& s, const PotentialSpec& spec,
                           const EnsembleParams& params, double dt, NoiseSource& noise);

/// Velocity Verlet. A negative dt integrates backwards in time.
PhaseState step_hamiltonian(const PhaseState& s, const PotentialSpec& spec,
                            const EnsembleParams& params, double dt);

/// Scalar function of the phase-space state.
struct Observable {
  std::string name;
  std::function<double(const PhaseState&)> fn;
};

/// Named observables understood by the CLI and the C API:
///   q, p       first coordinate (minimum image in [-L/2, L/2) on a torus)
///   q2, p2     |q|^2 (minimum image) and |p|^2
///   cos, sin   cos / sin(2 pi q_1 / L) (L = 1 on R^d)
///   V, H       potential and total energy
///   flux       gamma (|p|^2 / m^2 - d / (m beta)), the equilibrium energy flux
Observable make_observable(std::string_view name, const PotentialSpec& spec,
                           const EnsembleParams& params);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> values;  // row-major, rows() x n_observables
  std::size_t n_observables = 0;
  PhaseState final_state;
  double dt = 0.0;
  std::size_t stride = 1;

  std::size_t rows() const noexcept { return times.size(); }
  double at(std::size_t row, std::size_t obs) const { return values[row * n_observables + obs]; }
  std::vector<double> column(std::size_t obs) const;
};

/// Iterates the chosen scheme for n_steps and records every observable at
/// steps 0, stride, 2 stride, ... Deterministic given the noise source.
TrajectoryRecord simulate(const PhaseState& init, std::size_t n_steps, std::size_t stride,
                          double dt, Scheme scheme, const std::vector<Observable>& observables,
                          const PotentialSpec& spec, const EnsembleParams& params,
                          NoiseSource& noise);

/// Runs n_chains independent chains in parallel, chain i drawing from
/// RngStream(seed, first_stream + i). Results are returned in chain order.
std::vector<TrajectoryRecord> simulate_chains(const PhaseState& init, std::size_t n_chains,
                                              std::size_t n_steps, std::size_t stride, double dt,
                                              Scheme scheme,
                                              const std::vector<Observable>& observables,
                                              const PotentialSpec& spec,
                                              const EnsembleParams& params, std::uint64_t seed,
                                              std::uint64_t first_stream,
                                              std::size_t max_threads = 0);

/// Worker count: HYPOKIT_THREADS if set, else hardware concurrency, capped by
/// `requested` when non-zero.
std::size_t thread_budget(std::size_t requested = 0);

}  // namespace hypokit
