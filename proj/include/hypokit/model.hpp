// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hypokit {

/// Configuration space: a torus (L T)^d or the full space R^d.
struct Domain {
  enum class Kind { torus, full_space };

  Kind kind = Kind::full_space;
  std::size_t dim = 1;
  double length = 0.0;  // torus period, unused on R^d

  static Domain torus(double length, std::size_t dim);
  static Domain full_space(std::size_t dim);

  bool is_torus() const noexcept { return kind == Kind::torus; }
};

using ScalarField = std::function<double(std::span<const double>)>;
// Writes into the output span: d entries for gradients, d*d (row-major) for
// Hessians.
using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

/// Potential energy V with analytic first and second derivatives.
///
/// Evaluators are pure and may be shared between threads. On a torus every
/// evaluator wraps its argument into [0, L)^d before evaluating, so callers
/// never have to wrap positions themselves.
struct PotentialSpec {
  std::string name;
  Domain domain;
  ScalarField eval;
  VectorField grad;
  VectorField hessian;

  std::size_t dim() const noexcept { return domain.dim; }

  double value(std::span<const double> q) const;
  void gradient(std::span<const double> q, std::span<double> out) const;
  void hess(std::span<const double> q, std::span<double> out) const;
  double laplacian(std::span<const double> q) const;

  /// Wraps positions into [0, L)^d on a torus; no-op on R^d.
  void wrap(std::span<double> q) const;
};

/// Canonical-ensemble parameters with k_B = 1 and M = m Id.
struct EnsembleParams {
  double beta = 1.0;
  double mass = 1.0;
  double gamma = 1.0;

  /// gamma == 0 is accepted only when allow_zero_friction is set, which is
  /// the Hamiltonian integration case.
  void validate(bool allow_zero_friction = false) const;
};

struct PhaseState {
  std::vector<double> q;
  std::vector<double> p;

  std::size_t dim() const noexcept { return q.size(); }
};

/// H(q, p) = V(q) + |p|^2 / (2m).
double eval_hamiltonian(const PotentialSpec& spec, const EnsembleParams& params,
                        const PhaseState& s);

/// Builds one of the test-corpus potentials:
///   flat          {d, L}
///   quadratic     {omega, d, [L]}     V = omega^2 |q|^2 / 2
///   double_well   {a, b, d, [L]}      V = a sum (q_i^2 - b^2)^2
///   cosine        {h, modes, d, L}    V = h sum cos(2 pi modes q_i / L)
///   separable     {parts: [{name, params}, ...]}   V = sum v_i(q_i)
/// When a full-space potential receives an L it is periodized on (L T)^d
/// around the origin (see periodize).
PotentialSpec builtin_potential(std::string_view name, const nlohmann::json& params);

/// Periodic version of a full-space potential: q is replaced by its minimum
/// image in [-L/2, L/2)^d before evaluation.
PotentialSpec periodize(const PotentialSpec& spec, double length);

/// Minimum-image coordinate of x on a circle of length L, in [-L/2, L/2).
double minimum_image(double x, double length) noexcept;

/// Tensor-product grid of probe points (row-major, dim coordinates each).
struct QuadratureGrid {
  std::size_t dim = 0;
  std::vector<double> points;

  std::size_t size() const noexcept { return dim == 0 ? 0 : points.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dim, dim};
  }

  /// Periodic grid j L / n per dimension.
  static QuadratureGrid torus(double length, std::size_t dim, std::size_t per_dim);
  /// Uniform grid including both endpoints of [lo, hi] per dimension.
  static QuadratureGrid box(double lo, double hi, std::size_t dim, std::size_t per_dim);
};

struct ConditionConstants {
  double c1 = 0.0;
  double c3 = 0.0;
  bool feasible = false;
};

/// Smallest c1 >= 0 and c3 >= 0 such that, at every grid point,
///   Laplacian V <= c1 d + (c2 beta / 2) |grad V|^2,
///   |Hess V|_F^2 <= c3^2 (d + |grad V|^2).
ConditionConstants check_condition_constants(const PotentialSpec& spec,
                                             const EnsembleParams& params,
                                             const QuadratureGrid& grid, double c2);

}  // namespace hypokit
