// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "hypokit/error.hpp"
#include "hypokit/sde.hpp"

namespace hypokit {

Observable make_observable(std::string_view name, const PotentialSpec& spec,
                           const EnsembleParams& params) {
  const bool torus = spec.domain.is_torus();
  const double L = torus ? spec.domain.length : 1.0;
  auto coord = [torus, L](double x) { return torus ? minimum_image(x, L) : x; };
  const double w = 2.0 * std::numbers::pi / L;
  const std::string n(name);

  if (n == "q") return {n, [coord](const PhaseState& s) { return coord(s.q[0]); }};
  if (n == "p") return {n, [](const PhaseState& s) { return s.p[0]; }};
  if (n == "q2")
    return {n, [coord](const PhaseState& s) {
              double acc = 0.0;
              for (double x : s.q) acc += coord(x) * coord(x);
              return acc;
            }};
  if (n == "p2")
    return {n, [](const PhaseState& s) {
              double acc = 0.0;
              for (double x : s.p) acc += x * x;
              return acc;
            }};
  if (n == "cos") return {n, [w](const PhaseState& s) { return std::cos(w * s.q[0]); }};
  if (n == "sin") return {n, [w](const PhaseState& s) { return std::sin(w * s.q[0]); }};
  if (n == "V") return {n, [&spec](const PhaseState& s) { return spec.value(s.q); }};
  if (n == "H")
    return {n, [&spec, params](const PhaseState& s) { return eval_hamiltonian(spec, params, s); }};
  if (n == "flux") {
    const double m = params.mass;
    const double d = static_cast<double>(spec.dim());
    const double g = params.gamma;
    const double beta = params.beta;
    return {n, [m, d, g, beta](const PhaseState& s) {
              double acc = 0.0;
              for (double x : s.p) acc += x * x;
              return g * (acc / (m * m) - d / (m * beta));
            }};
  }
  fail(ErrorCode::invalid_argument, "unknown observable '" + n + "'");
}

}  // namespace hypokit
