// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hypokit/error.hpp"
#include "hypokit/spectral.hpp"

namespace hypokit {

Vector BasisSet::moments(const Vector& u_at_quad) const {
  return f_values.transpose() * quad_weights.cwiseProduct(u_at_quad);
}

std::vector<double> hermite_functions(std::size_t n, double p, double beta, double mass) {
  std::vector<double> h(n);
  if (n == 0) return h;
  const double x = p * std::sqrt(beta / mass);
  // Normalized recurrence: sqrt(k+1) h_{k+1} = x h_k - sqrt(k) h_{k-1}.
  h[0] = 1.0;
  if (n > 1) h[1] = x;
  for (std::size_t k = 1; k + 1 < n; ++k)
    h[k + 1] = (x * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) /
               std::sqrt(static_cast<double>(k + 1));
  return h;
}

namespace {

double fourier(std::size_t k, double q, double L) {
  if (k == 0) return 1.0;
  const double w = 2.0 * std::numbers::pi * static_cast<double>((k + 1) / 2) / L;
  return std::numbers::sqrt2 * (k % 2 == 1 ? std::cos(w * q) : std::sin(w * q));
}

double fourier_derivative(std::size_t k, double q, double L) {
  if (k == 0) return 0.0;
  const double w = 2.0 * std::numbers::pi * static_cast<double>((k + 1) / 2) / L;
  return std::numbers::sqrt2 * w * (k % 2 == 1 ? -std::sin(w * q) : std::cos(w * q));
}

}  // namespace

double basis_function(const BasisSet& basis, std::size_t index, double q, double p) {
  if (index >= basis.size()) fail(ErrorCode::invalid_argument, "basis index out of range");
  const std::size_t n = index / basis.nq(), k = index % basis.nq();
  return fourier(k, q, basis.L) * hermite_functions(n + 1, p, basis.beta, basis.mass)[n];
}

BasisSet build_basis(const PotentialSpec& spec, const EnsembleParams& params, std::size_t Kq,
                     std::size_t Np, std::size_t n_quad) {
  params.validate(true);
  if (!spec.domain.is_torus() || spec.dim() != 1)
    fail(ErrorCode::unsupported_domain, "spectral bases need a one-dimensional torus");
  if (Np < 1) fail(ErrorCode::invalid_argument, "Np must be at least 1");
  if (n_quad < 8 * std::max<std::size_t>(Kq, 1))
    fail(ErrorCode::invalid_argument, "n_quad must be at least 8 Kq");

  BasisSet b;
  b.Kq = Kq;
  b.Np = Np;
  b.n_quad = n_quad;
  b.L = spec.domain.length;
  b.beta = params.beta;
  b.mass = params.mass;

  const auto nq = static_cast<Eigen::Index>(b.nq());
  const auto nx = static_cast<Eigen::Index>(n_quad);
  b.quad_points.resize(n_quad);
  b.v_values.resize(nx);
  b.dv_values.resize(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double q = b.L * static_cast<double>(i) / static_cast<double>(n_quad);
    b.quad_points[i] = q;
    double g;
    b.v_values(i) = spec.value(std::span<const double>(&q, 1));
    spec.gradient(std::span<const double>(&q, 1), std::span<double>(&g, 1));
    b.dv_values(i) = g;
  }
  if (!b.v_values.allFinite() || !b.dv_values.allFinite())
    fail(ErrorCode::invalid_argument, "potential is not finite on the quadrature grid");
  b.v_min = b.v_values.minCoeff();
  b.quad_weights =
      ((-params.beta) * (b.v_values.array() - b.v_min)).exp().matrix() * (b.L / static_cast<double>(n_quad));

  b.f_values.resize(nx, nq);
  b.df_values.resize(nx, nq);
  for (Eigen::Index k = 0; k < nq; ++k)
    for (Eigen::Index i = 0; i < nx; ++i) {
      b.f_values(i, k) = fourier(static_cast<std::size_t>(k), b.quad_points[i], b.L);
      b.df_values(i, k) = fourier_derivative(static_cast<std::size_t>(k), b.quad_points[i], b.L);
    }
  b.gram_q = b.f_values.transpose() * b.quad_weights.asDiagonal() * b.f_values;
  b.gram_q = 0.5 * (b.gram_q + b.gram_q.transpose()).eval();
  linalg::cholesky_upper(b.gram_q);  // positive definiteness check
  return b;
}

}  // namespace hypokit
