// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hypokit/error.hpp"
#include "hypokit/spectral.hpp"

namespace hypokit {

OverdampedMatrices assemble_overdamped(const BasisSet& basis, const PotentialSpec& spec,
                                       const EnsembleParams& params) {
  params.validate(true);
  if (!spec.domain.is_torus() || spec.dim() != 1)
    fail(ErrorCode::unsupported_domain, "overdamped assembly needs a one-dimensional torus");
  OverdampedMatrices o;
  o.gram_q = basis.gram_q;
  o.L_ovd = -(1.0 / params.beta) *
            (basis.df_values.transpose() * basis.quad_weights.asDiagonal() * basis.df_values);
  o.L_ovd = 0.5 * (o.L_ovd + o.L_ovd.transpose()).eval();
  return o;
}

namespace {

Matrix deflated_ovd(const Matrix& L_ovd, const Matrix& gram_q) {
  const Matrix r = linalg::cholesky_upper(gram_q);
  const Matrix k = linalg::congruence_inverse(r, L_ovd);
  const Eigen::Index n = k.rows() - 1;
  return k.bottomRightCorner(n, n);
}

}  // namespace

double poincare_constant(const PotentialSpec& spec, const EnsembleParams& params, std::size_t Kq,
                         std::size_t n_quad) {
  if (Kq < 1) fail(ErrorCode::invalid_argument, "Kq must be at least 1");
  if (n_quad == 0) n_quad = std::max<std::size_t>(256, 16 * Kq);
  const BasisSet b = build_basis(spec, params, Kq, 1, n_quad);
  const OverdampedMatrices o = assemble_overdamped(b, spec, params);
  const Vector ev = linalg::symmetric_eigenvalues(-deflated_ovd(o.L_ovd, o.gram_q));
  const double lam = ev(0);
  if (!(lam > 0.0)) fail(ErrorCode::numerical_failure, "overdamped generator has no positive gap");
  return params.beta * lam;
}

DecayCheck semigroup_decay_check(const Matrix& L_ovd, const Matrix& gram_q, double R_nu,
                                 double beta, const std::vector<double>& times) {
  if (!(R_nu > 0.0) || !(beta > 0.0))
    fail(ErrorCode::invalid_argument, "decay check needs R > 0 and beta > 0");
  const Matrix kd = deflated_ovd(L_ovd, gram_q);
  DecayCheck d;
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "times must be >= 0");
    const double norm = linalg::max_singular_value(linalg::expm(t * kd));
    const double bound = std::exp(-R_nu * t / beta);
    d.norms.push_back(norm);
    d.bounds.push_back(bound);
    d.max_ratio = std::max(d.max_ratio, norm / bound);
  }
  d.holds = d.max_ratio <= 1.0 + 1e-8;
  return d;
}

PoissonResult solve_poisson_overdamped(const OverdampedMatrices& ovd, const Vector& phi_q_coeffs) {
  const auto nq = ovd.gram_q.rows();
  if (phi_q_coeffs.size() < nq) fail(ErrorCode::invalid_argument, "coefficient vector too short");
  const Matrix r = linalg::cholesky_upper(ovd.gram_q);
  const Vector y = r.triangularView<Eigen::Upper>() * phi_q_coeffs.head(nq);
  const Eigen::Index n = nq - 1;
  const Vector yd = y.tail(n);
  Vector z = Vector::Zero(n);
  if (yd.norm() > 0.0) z = linalg::solve(-deflated_ovd(ovd.L_ovd, ovd.gram_q), yd);
  Vector full = Vector::Zero(nq);
  full.tail(n) = z;
  PoissonResult out;
  out.Phi = linalg::solve_upper(r, full);
  out.sigma2 = 2.0 * z.dot(yd) / ovd.gram_q(0, 0);
  return out;
}

}  // namespace hypokit
