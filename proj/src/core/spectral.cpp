// SPDX-License-Identifier: Apache-2.0
#include "hypokit/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hypokit/error.hpp"

namespace hypokit {

namespace {

Eigen::Index blk(const BasisSet& b, std::size_t n) {
  return static_cast<Eigen::Index>(n * b.nq());
}

}  // namespace

GeneratorAssembly assemble_generator(const BasisSet& basis, const PotentialSpec& spec,
                                     const EnsembleParams& params) {
  params.validate();
  if (!spec.domain.is_torus() || spec.dim() != 1)
    fail(ErrorCode::unsupported_domain, "spectral assembly needs a one-dimensional torus");
  if (std::abs(spec.domain.length - basis.L) > 1e-14 * basis.L ||
      basis.beta != params.beta || basis.mass != params.mass)
    fail(ErrorCode::invalid_argument, "basis was built for different parameters");

  GeneratorAssembly a;
  a.basis = basis;
  a.gamma = params.gamma;
  const auto nq = static_cast<Eigen::Index>(basis.nq());
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double m = params.mass;
  const double c = 1.0 / std::sqrt(m * params.beta);

  // D(k', k) = int f_k' f_k' e^{-beta V}
  const Matrix D = basis.f_values.transpose() * basis.quad_weights.asDiagonal() * basis.df_values;
  a.chol_q = linalg::cholesky_upper(basis.gram_q);
  const Matrix Dt = linalg::congruence_inverse(a.chol_q, D);

  a.L_ham = Matrix::Zero(n, n);
  a.L_FD = Matrix::Zero(n, n);
  a.gram = Matrix::Zero(n, n);
  a.K_ham = Matrix::Zero(n, n);
  a.K_FD = Matrix::Zero(n, n);
  a.pi0 = Matrix::Zero(n, n);
  a.pi0.topLeftCorner(nq, nq).setIdentity();
  for (std::size_t l = 0; l < basis.Np; ++l) {
    const Eigen::Index o = blk(basis, l);
    a.gram.block(o, o, nq, nq) = basis.gram_q;
    a.L_FD.block(o, o, nq, nq) = -(static_cast<double>(l) / m) * basis.gram_q;
    a.K_FD.block(o, o, nq, nq) = -(static_cast<double>(l) / m) * Matrix::Identity(nq, nq);
    if (l + 1 < basis.Np) {
      const Eigen::Index up = blk(basis, l + 1);
      const double s = c * std::sqrt(static_cast<double>(l + 1));
      a.L_ham.block(up, o, nq, nq) = s * D;
      a.L_ham.block(o, up, nq, nq) = -s * D.transpose();
      a.K_ham.block(up, o, nq, nq) = s * Dt;
      a.K_ham.block(o, up, nq, nq) = -s * Dt.transpose();
    }
  }
  auto scaled = [](const Matrix& x) -> Matrix {
    const double mx = x.cwiseAbs().maxCoeff();
    return mx > 0.0 ? Matrix(x.cwiseAbs() / mx) : Matrix(x.cwiseAbs());
  };
  const Matrix pattern = scaled(a.L_ham) + scaled(a.L_FD) + scaled(a.gram);
  a.deflated_blocks = linalg::connected_blocks(pattern.bottomRightCorner(n - 1, n - 1));
  return a;
}

Matrix GeneratorAssembly::operator_matrix() const {
  Matrix out(generator());
  const auto nq = static_cast<Eigen::Index>(basis.nq());
  for (std::size_t l = 0; l < basis.Np; ++l) {
    const Eigen::Index o = blk(basis, l);
    Matrix rows = out.middleRows(o, nq);
    rows = linalg::solve_upper(chol_q, linalg::solve_upper_transpose(chol_q, rows));
    out.middleRows(o, nq) = rows;
  }
  return out;
}

Matrix GeneratorAssembly::deflated(double gamma_value) const {
  const Eigen::Index n = static_cast<Eigen::Index>(size()) - 1;
  return K_ham.bottomRightCorner(n, n) + gamma_value * K_FD.bottomRightCorner(n, n);
}

Vector GeneratorAssembly::to_orthonormal(const Vector& x) const {
  const auto nq = static_cast<Eigen::Index>(basis.nq());
  Vector y(x.size());
  for (std::size_t l = 0; l < basis.Np; ++l) {
    const Eigen::Index o = blk(basis, l);
    y.segment(o, nq) = chol_q.triangularView<Eigen::Upper>() * x.segment(o, nq);
  }
  return y;
}

Vector GeneratorAssembly::from_orthonormal(const Vector& y) const {
  const auto nq = static_cast<Eigen::Index>(basis.nq());
  Vector x(y.size());
  for (std::size_t l = 0; l < basis.Np; ++l) {
    const Eigen::Index o = blk(basis, l);
    x.segment(o, nq) = linalg::solve_upper(chol_q, y.segment(o, nq));
  }
  return x;
}

GapResult spectral_gap(const GeneratorAssembly& asm_, bool adjoint) {
  return spectral_gap(asm_, asm_.gamma, adjoint);
}

GapResult spectral_gap(const GeneratorAssembly& asm_, double gamma, bool adjoint) {
  if (!(gamma > 0.0)) fail(ErrorCode::invalid_argument, "spectral gap needs gamma > 0");
  if (asm_.size() < 2) fail(ErrorCode::invalid_argument, "basis too small");
  Matrix k = -asm_.deflated(gamma);
  if (adjoint) k.transposeInPlace();
  GapResult r;
  r.eigenvalues = linalg::eigenvalues(k, asm_.deflated_blocks);
  r.eig_count_checked = static_cast<std::size_t>(r.eigenvalues.size());
  r.gap = r.eigenvalues.real().minCoeff();
  if (!std::isfinite(r.gap)) fail(ErrorCode::numerical_failure, "non-finite eigenvalue");
  std::sort(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size(),
            [](const auto& x, const auto& y) {
              return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
            });
  return r;
}

Vector project_observable(const BasisSet& basis, const std::function<double(double, double)>& phi) {
  Vector x, w;
  linalg::gauss_hermite(basis.Np + 24, x, w);
  const double scale = std::sqrt(basis.mass / basis.beta);
  const auto nq = static_cast<Eigen::Index>(basis.nq());
  const auto nx = static_cast<Eigen::Index>(basis.n_quad);
  Matrix hv(x.size(), static_cast<Eigen::Index>(basis.Np));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const auto h = hermite_functions(basis.Np, scale * x(j), basis.beta, basis.mass);
    for (std::size_t l = 0; l < basis.Np; ++l) hv(j, static_cast<Eigen::Index>(l)) = h[l];
  }
  // values(i, j) = phi(q_i, p_j)
  Matrix values(nx, x.size());
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index j = 0; j < x.size(); ++j) values(i, j) = phi(basis.quad_points[i], scale * x(j));
  const Matrix mom = basis.f_values.transpose() * basis.quad_weights.asDiagonal() * values *
                     w.asDiagonal() * hv;  // Nq x Np
  const Matrix r = linalg::cholesky_upper(basis.gram_q);
  const Matrix coeff = linalg::solve_upper(r, linalg::solve_upper_transpose(r, mom));
  Vector out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t l = 0; l < basis.Np; ++l)
    out.segment(blk(basis, l), nq) = coeff.col(static_cast<Eigen::Index>(l));
  return out;
}

Vector project_observable_q(const BasisSet& basis, const std::function<double(double)>& phi) {
  Vector u(static_cast<Eigen::Index>(basis.n_quad));
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = phi(basis.quad_points[i]);
  const Matrix r = linalg::cholesky_upper(basis.gram_q);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(basis.size()));
  out.head(static_cast<Eigen::Index>(basis.nq())) =
      linalg::solve_upper(r, linalg::solve_upper_transpose(r, basis.moments(u)));
  return out;
}

PoissonResult solve_poisson(const GeneratorAssembly& asm_, const Vector& phi_coeffs) {
  if (phi_coeffs.size() != static_cast<Eigen::Index>(asm_.size()))
    fail(ErrorCode::invalid_argument, "coefficient vector has the wrong length");
  const Vector y = asm_.to_orthonormal(phi_coeffs);
  const Eigen::Index n = y.size() - 1;
  const Vector yd = y.tail(n);
  PoissonResult r;
  Vector z = Vector::Zero(n);
  if (yd.norm() > 0.0) z = linalg::solve(-asm_.deflated(), yd);
  Vector full = Vector::Zero(y.size());
  full.tail(n) = z;
  r.Phi = asm_.from_orthonormal(full);
  r.sigma2 = 2.0 * z.dot(yd) / asm_.basis.partition_function();
  return r;
}

}  // namespace hypokit
