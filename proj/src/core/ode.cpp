// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hypokit/error.hpp"
#include "hypokit/hypo.hpp"

namespace hypokit {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    fail(ErrorCode::invalid_argument, "gamma must be positive and finite");
}

double min_sym_eig(const Matrix2& m) {
  Eigen::SelfAdjointEigenSolver<Matrix2> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

Matrix2 ode_matrix(double gamma) {
  Matrix2 l;
  l << 0.0, -1.0, 1.0, -gamma;
  return l;
}

double ode_gap(double gamma) {
  check_gamma(gamma);
  if (gamma <= 2.0) return 0.5 * gamma;
  return 2.0 / (gamma + std::sqrt(gamma * gamma - 4.0));
}

OdeEigs ode_eigs(double gamma) {
  check_gamma(gamma);
  OdeEigs e;
  const std::complex<double> disc = std::sqrt(std::complex<double>(gamma * gamma / 4.0 - 1.0, 0.0));
  e.lambda_plus = 0.5 * gamma + disc;
  // product of the roots is 1; avoids cancellation for gamma >> 2
  e.lambda_minus = gamma > 2.0 ? 1.0 / e.lambda_plus : 0.5 * gamma - disc;
  e.gap = ode_gap(gamma);

  Eigen::EigenSolver<Matrix2> es(-ode_matrix(gamma), false);
  std::complex<double> a = es.eigenvalues()(0), b = es.eigenvalues()(1);
  if (std::abs(a - e.lambda_plus) + std::abs(b - e.lambda_minus) >
      std::abs(b - e.lambda_plus) + std::abs(a - e.lambda_minus))
    std::swap(a, b);
  e.check_plus = a;
  e.check_minus = b;
  return e;
}

OptimalP ode_optimal_P(double gamma) {
  check_gamma(gamma);
  if (std::abs(gamma - 2.0) <= 1e-6)
    fail(ErrorCode::defective_case,
         "gamma = 2 is defective; use the perturbative P (epsilon = 0.5) instead");
  const Matrix2 l = ode_matrix(gamma);
  Eigen::EigenSolver<Matrix2> es(l.transpose());
  Matrix2 p = Matrix2::Zero();
  for (int i = 0; i < 2; ++i) {
    const Eigen::Vector2cd x = es.eigenvectors().col(i);
    p += (x * x.adjoint()).real() / x.squaredNorm();
  }
  OptimalP out;
  out.P = 0.5 * (p + p.transpose());
  out.lambda = ode_gap(gamma);
  out.min_eig = min_sym_eig(-(out.P * l + l.transpose() * out.P) - 2.0 * out.lambda * out.P);
  out.cert = out.min_eig >= -1e-10 && min_sym_eig(out.P) > 0.0;
  return out;
}

PerturbativeP ode_perturbative_P(double gamma, double epsilon) {
  check_gamma(gamma);
  if (!(epsilon >= 0.0))
    fail(ErrorCode::invalid_epsilon, "epsilon must be non-negative");
  if (!(epsilon < 1.0))
    fail(ErrorCode::invalid_epsilon, "epsilon >= 1 makes P not positive definite");
  const Matrix2 l = ode_matrix(gamma);
  PerturbativeP out;
  out.P << 1.0, -epsilon, -epsilon, 1.0;
  out.min_eig_of_dissipation = min_sym_eig(-(out.P * l + l.transpose() * out.P));
  return out;
}

std::vector<OdeSample> ode_trajectory(double gamma, std::array<double, 2> x0, double T, double dt) {
  check_gamma(gamma);
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::invalid_argument, "dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) fail(ErrorCode::invalid_argument, "T must be >= 0");
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double h = n > 0 ? T / static_cast<double>(n) : 0.0;
  const Matrix2 l = ode_matrix(gamma);
  Eigen::Vector2d x(x0[0], x0[1]);
  std::vector<OdeSample> out;
  out.reserve(n + 1);
  out.push_back({0.0, x(0), x(1)});
  for (std::size_t i = 1; i <= n; ++i) {
    const Eigen::Vector2d k1 = l * x;
    const Eigen::Vector2d k2 = l * (x + 0.5 * h * k1);
    const Eigen::Vector2d k3 = l * (x + 0.5 * h * k2);
    const Eigen::Vector2d k4 = l * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back({static_cast<double>(i) * h, x(0), x(1)});
  }
  return out;
}

std::array<double, 2> ode_exact(double gamma, std::array<double, 2> x0, double t) {
  check_gamma(gamma);
  const Matrix e = linalg::expm(t * Matrix(ode_matrix(gamma)));
  return {e(0, 0) * x0[0] + e(0, 1) * x0[1], e(1, 0) * x0[0] + e(1, 1) * x0[1]};
}

double fit_envelope_decay(const std::vector<OdeSample>& s) {
  if (s.size() < 3) fail(ErrorCode::insufficient_data, "trajectory too short for an envelope fit");
  std::vector<double> r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = std::hypot(s[i].x1, s[i].x2);
  std::vector<double> t, y;
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    if (r[i] > r[i - 1] && r[i] >= r[i + 1] && r[i] > 0.0) {
      t.push_back(s[i].t);
      y.push_back(std::log(r[i]));
    }
  if (t.size() < 3) {
    t.clear();
    y.clear();
    const double half = 0.5 * s.back().t;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i].t >= half && r[i] > 0.0) {
        t.push_back(s[i].t);
        y.push_back(std::log(r[i]));
      }
  }
  if (t.size() < 2) fail(ErrorCode::insufficient_data, "no usable samples for an envelope fit");
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return -(n * sty - st * sy) / (n * stt - st * st);
}

PrefactorProbe ode_probe_unit_prefactor(double gamma, double T, std::size_t n_angles,
                                        std::size_t n_times) {
  check_gamma(gamma);
  if (!(T > 0.0) || n_angles < 1 || n_times < 1)
    fail(ErrorCode::invalid_argument, "probe needs T > 0 and non-empty grids");
  const double lambda = ode_gap(gamma);
  const Matrix l = ode_matrix(gamma);
  PrefactorProbe out;
  for (std::size_t j = 1; j <= n_times; ++j) {
    const double t = T * static_cast<double>(j) / static_cast<double>(n_times);
    const Matrix e = linalg::expm(t * l);
    for (std::size_t a = 0; a < n_angles; ++a) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
      const double x = e(0, 0) * std::cos(th) + e(0, 1) * std::sin(th);
      const double y = e(1, 0) * std::cos(th) + e(1, 1) * std::sin(th);
      out.max_ratio = std::max(out.max_ratio, std::hypot(x, y) * std::exp(lambda * t));
    }
  }
  out.exceeds = out.max_ratio > 1.0 + 1e-12;
  return out;
}

}  // namespace hypokit
