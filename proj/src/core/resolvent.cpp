// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hypokit/error.hpp"
#include "hypokit/hypo.hpp"

namespace hypokit {

double resolvent_norm(const GeneratorAssembly& asm_) {
  const double s = linalg::min_singular_value(asm_.deflated(), asm_.deflated_blocks);
  if (!(s > 1e-14)) fail(ErrorCode::numerical_failure, "generator is singular on mean-zero functions");
  return 1.0 / s;
}

SchurBound schur_bound(const EnsembleParams& params, double R_nu, const SchurCase& c) {
  params.validate();
  if (!(R_nu > 0.0) || !std::isfinite(R_nu))
    fail(ErrorCode::invalid_argument, "Poincare constant must be positive");
  SchurBound b;
  switch (c.kind) {
    case SchurCase::Kind::convex:
      b.C = 1.0;
      b.C_prime = 0.0;
      break;
    case SchurCase::Kind::hessian_lower_bound:
      if (!(c.K >= 0.0)) fail(ErrorCode::invalid_argument, "Hessian lower bound K must be >= 0");
      b.C = 1.0;
      b.C_prime = c.K;
      break;
    case SchurCase::Kind::general:
      if (!(c.C_prime >= 0.0)) fail(ErrorCode::invalid_argument, "C' must be >= 0");
      b.C = 2.0;
      b.C_prime = c.C_prime;
      b.unpinned = true;
      break;
  }
  const double beta = params.beta, gamma = params.gamma, m = params.mass;
  b.bound = 2.0 * beta * gamma / R_nu + (8.0 * m / gamma) * (0.375 + b.C + b.C_prime / R_nu);
  return b;
}

namespace {

double min_hessian_on_grid(const GeneratorAssembly& a, const PotentialSpec& spec) {
  double lo = INFINITY;
  for (double q : a.basis.quad_points) {
    double h;
    spec.hess(std::span<const double>(&q, 1), std::span<double>(&h, 1));
    lo = std::min(lo, h);
  }
  return lo;
}

}  // namespace

SchurCheck verify_schur_bound(const GeneratorAssembly& asm_, const PotentialSpec& spec,
                              const EnsembleParams& params, const SchurCase& c, double R_nu,
                              double slack) {
  if (!(slack >= 0.0)) fail(ErrorCode::invalid_argument, "slack must be >= 0");
  const double hmin = min_hessian_on_grid(asm_, spec);
  const double tol = 1e-9 * (1.0 + std::abs(hmin));
  if (c.kind == SchurCase::Kind::convex && hmin < -tol)
    fail(ErrorCode::invalid_argument,
         "potential is not convex on the grid; use the Hessian lower bound or general case");
  if (c.kind == SchurCase::Kind::hessian_lower_bound && hmin < -c.K - tol)
    fail(ErrorCode::invalid_argument, "Hessian drops below -K on the grid");
  const SchurBound b = schur_bound(params, R_nu, c);
  SchurCheck out;
  out.numeric = resolvent_norm(asm_);
  out.bound = b.bound;
  out.unpinned = b.unpinned;
  out.holds = out.numeric <= b.bound * (1.0 + slack);
  return out;
}

namespace {

double ratio(const GeneratorAssembly& a, const Vector& coeffs) {
  const Vector y = a.to_orthonormal(coeffs);
  const Eigen::Index n = y.size() - 1;
  const Vector yd = y.tail(n);
  const double num = yd.norm();
  const double den = (a.deflated() * yd).norm();
  if (!(num > 0.0) || !(den > 0.0)) fail(ErrorCode::degenerate_witness, "witness vanishes");
  return num / den;
}

Vector fourier_coeffs(const BasisSet& b, const Vector& values) {
  const Matrix r = linalg::cholesky_upper(b.gram_q);
  return linalg::solve_upper(r, linalg::solve_upper_transpose(r, b.moments(values)));
}

}  // namespace

Witnesses resolvent_lower_bound(const PotentialSpec& spec, const EnsembleParams& params,
                                const GeneratorAssembly& asm_) {
  params.validate();
  const BasisSet& b = asm_.basis;
  if (b.Np < 3) fail(ErrorCode::invalid_argument, "witnesses need Np >= 3");
  if (!spec.domain.is_torus() || spec.dim() != 1)
    fail(ErrorCode::unsupported_domain, "witnesses need a one-dimensional torus");
  const double vscale = 1.0 + b.v_values.cwiseAbs().maxCoeff();
  if (b.dv_values.cwiseAbs().maxCoeff() <= 1e-12 * vscale)
    fail(ErrorCode::degenerate_witness, "potential is constant");

  const auto nq = static_cast<Eigen::Index>(b.nq());
  const Vector cv = fourier_coeffs(b, b.v_values);
  const Vector cdv = fourier_coeffs(b, b.dv_values);
  Witnesses w;

  Vector u = Vector::Zero(static_cast<Eigen::Index>(b.size()));
  u.segment(0, nq) = params.gamma * cv;
  u.segment(nq, nq) = std::sqrt(params.mass / params.beta) * cdv;
  w.overdamped_witness = ratio(asm_, u);

  // p^2 / (2m) = (h_0 + sqrt(2) h_2) / (2 beta)
  Vector h = Vector::Zero(static_cast<Eigen::Index>(b.size()));
  h.segment(0, nq) = cv;
  h(0) += 0.5 / params.beta;
  h(2 * nq) += std::numbers::sqrt2 * 0.5 / params.beta;
  w.underdamped_witness = ratio(asm_, h);
  return w;
}

}  // namespace hypokit
