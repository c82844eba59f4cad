// SPDX-License-Identifier: Apache-2.0
#include "hypokit/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "hypokit/error.hpp"

namespace hypokit {

namespace {

void check_state(const PhaseState& s, const PotentialSpec& spec) {
  if (s.q.size() != spec.dim() || s.p.size() != spec.dim())
    fail(ErrorCode::invalid_argument, "phase state dimension does not match the potential");
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    fail(ErrorCode::invalid_argument, "time step must be positive and finite");
}

// Integrator with a cached force, so that simulate() evaluates the gradient
// once per step. The free step functions build a fresh one each call; both
// paths perform the same floating-point operations.
class Integrator {
 public:
  Integrator(const PotentialSpec& spec, const EnsembleParams& params, double dt, Scheme scheme)
      : spec_(spec), params_(params), dt_(dt), scheme_(scheme),
        force_(spec.dim()), noise_(spec.dim()) {
    if (scheme_ == Scheme::langevin) {
      const double c = std::exp(-params.gamma * dt / params.mass);
      ou_decay_ = c;
      ou_noise_ = std::sqrt(params.mass / params.beta * (1.0 - c * c));
    }
    if (scheme_ == Scheme::overdamped) ou_noise_ = std::sqrt(2.0 * dt / params.beta);
  }

  void prime(const PhaseState& s) {
    spec_.gradient(s.q, force_);
    primed_ = true;
  }

  void step(PhaseState& s, NoiseSource* noise) {
    if (!primed_) prime(s);
    const std::size_t d = s.dim();
    const double m = params_.mass;
    switch (scheme_) {
      case Scheme::langevin: {
        const double h = 0.5 * dt_;
        for (std::size_t i = 0; i < d; ++i) s.p[i] -= h * force_[i];
        for (std::size_t i = 0; i < d; ++i) s.q[i] += h * s.p[i] / m;
        noise->fill_normal(noise_);
        for (std::size_t i = 0; i < d; ++i) s.p[i] = ou_decay_ * s.p[i] + ou_noise_ * noise_[i];
        for (std::size_t i = 0; i < d; ++i) s.q[i] += h * s.p[i] / m;
        spec_.wrap(s.q);
        spec_.gradient(s.q, force_);
        for (std::size_t i = 0; i < d; ++i) s.p[i] -= h * force_[i];
        break;
      }
      case Scheme::overdamped: {
        noise->fill_normal(noise_);
        for (std::size_t i = 0; i < d; ++i) s.q[i] += -dt_ * force_[i] + ou_noise_ * noise_[i];
        spec_.wrap(s.q);
        spec_.gradient(s.q, force_);
        break;
      }
      case Scheme::hamiltonian: {
        const double h = 0.5 * dt_;
        for (std::size_t i = 0; i < d; ++i) s.p[i] -= h * force_[i];
        for (std::size_t i = 0; i < d; ++i) s.q[i] += dt_ * s.p[i] / m;
        spec_.wrap(s.q);
        spec_.gradient(s.q, force_);
        for (std::size_t i = 0; i < d; ++i) s.p[i] -= h * force_[i];
        break;
      }
    }
  }

 private:
  const PotentialSpec& spec_;
  const EnsembleParams& params_;
  double dt_;
  Scheme scheme_;
  std::vector<double> force_;
  std::vector<double> noise_;
  double ou_decay_ = 0.0;
  double ou_noise_ = 0.0;
  bool primed_ = false;
};

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "langevin" || name == "baoab") return Scheme::langevin;
  if (name == "overdamped") return Scheme::overdamped;
  if (name == "hamiltonian" || name == "verlet") return Scheme::hamiltonian;
  fail(ErrorCode::invalid_argument, "unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::langevin: return "langevin";
    case Scheme::overdamped: return "overdamped";
    case Scheme::hamiltonian: return "hamiltonian";
  }
  return "unknown";
}

PhaseState step_langevin(const PhaseState& s, const PotentialSpec& spec,
                         const EnsembleParams& params, double dt, NoiseSource& noise) {
  params.validate();
  check_state(s, spec);
  check_dt(dt);
  PhaseState out = s;
  Integrator(spec, params, dt, Scheme::langevin).step(out, &noise);
  return out;
}

PhaseState step_overdamped(const PhaseState& s, const PotentialSpec& spec,
                           const EnsembleParams& params, double dt, NoiseSource& noise) {
  params.validate(true);
  check_state(s, spec);
  check_dt(dt);
  PhaseState out = s;
  Integrator(spec, params, dt, Scheme::overdamped).step(out, &noise);
  return out;
}

PhaseState step_hamiltonian(const PhaseState& s, const PotentialSpec& spec,
                            const EnsembleParams& params, double dt) {
  params.validate(true);
  check_state(s, spec);
  if (dt == 0.0 || !std::isfinite(dt))
    fail(ErrorCode::invalid_argument, "time step must be non-zero and finite");
  PhaseState out = s;
  Integrator(spec, params, dt, Scheme::hamiltonian).step(out, nullptr);
  return out;
}

std::vector<double> TrajectoryRecord::column(std::size_t obs) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, obs);
  return out;
}

TrajectoryRecord simulate(const PhaseState& init, std::size_t n_steps, std::size_t stride,
                          double dt, Scheme scheme, const std::vector<Observable>& observables,
                          const PotentialSpec& spec, const EnsembleParams& params,
                          NoiseSource& noise) {
  if (n_steps < 1) fail(ErrorCode::invalid_argument, "n_steps must be at least 1");
  if (stride < 1) fail(ErrorCode::invalid_argument, "stride must be at least 1");
  params.validate(scheme != Scheme::langevin);
  check_state(init, spec);
  check_dt(dt);

  TrajectoryRecord rec;
  rec.dt = dt;
  rec.stride = stride;
  rec.n_observables = observables.size();
  const std::size_t n_rows = n_steps / stride + 1;
  rec.times.reserve(n_rows);
  rec.values.reserve(n_rows * observables.size());

  PhaseState s = init;
  spec.wrap(s.q);
  auto record = [&](std::size_t step) {
    rec.times.push_back(static_cast<double>(step) * dt);
    for (const auto& obs : observables) rec.values.push_back(obs.fn(s));
  };

  Integrator integrator(spec, params, dt, scheme);
  integrator.prime(s);
  record(0);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    integrator.step(s, &noise);
    if (step % stride == 0) record(step);
  }
  rec.final_state = std::move(s);
  return rec;
}

std::size_t thread_budget(std::size_t requested) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HYPOKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<std::size_t>(v);
  }
  if (requested > 0) n = std::min(n, requested);
  return n;
}

std::vector<TrajectoryRecord> simulate_chains(const PhaseState& init, std::size_t n_chains,
                                              std::size_t n_steps, std::size_t stride, double dt,
                                              Scheme scheme,
                                              const std::vector<Observable>& observables,
                                              const PotentialSpec& spec,
                                              const EnsembleParams& params, std::uint64_t seed,
                                              std::uint64_t first_stream,
                                              std::size_t max_threads) {
  std::vector<TrajectoryRecord> out(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);
  const std::size_t workers = std::min(thread_budget(max_threads), std::max<std::size_t>(n_chains, 1));
  auto run_range = [&](std::size_t worker) {
    for (std::size_t c = worker; c < n_chains; c += workers) {
      try {
        RngStream rng(seed, first_stream + c);
        out[c] = simulate(init, n_steps, stride, dt, scheme, observables, spec, params, rng);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run_range(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace hypokit
