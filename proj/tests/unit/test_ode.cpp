// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hypokit/error.hpp"
#include "hypokit/hypo.hpp"

using namespace hypokit;

namespace {

// Eigenvalues of -L = [[0, 1], [-1, gamma]] from a general eigensolver.
std::pair<std::complex<double>, std::complex<double>> direct_eigs(double gamma) {
  Eigen::Matrix2d m;
  m << 0.0, 1.0, -1.0, gamma;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m.cast<std::complex<double>>());
  return {es.eigenvalues()[0], es.eigenvalues()[1]};
}

// Closed-form propagator for gamma < 2:
// exp(tL) = e^{-gamma t / 2} (cos(wt) I + sin(wt)/w (L + gamma/2 I)).
std::array<double, 2> underdamped_exact(double gamma, std::array<double, 2> x, double t) {
  const double w = std::sqrt(1.0 - 0.25 * gamma * gamma);
  const double c = std::cos(w * t), s = std::sin(w * t) / w, e = std::exp(-0.5 * gamma * t);
  // L = [[0, -1], [1, -gamma]]
  const double y0 = (0.5 * gamma) * x[0] - x[1];
  const double y1 = x[0] + (0.5 * gamma - gamma) * x[1];
  return {e * (c * x[0] + s * y0), e * (c * x[1] + s * y1)};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST(Ode, Examples) {
  auto e = ode_eigs(1.0);
  EXPECT_NEAR(e.lambda_plus.real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(e.lambda_plus.imag()), std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(ode_gap(1.0), 0.5, 1e-15);
  EXPECT_NEAR(ode_gap(4.0), 2.0 - std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(ode_gap(2.0), 1.0, 1e-15);
  EXPECT_EQ(code_of([] { ode_eigs(0.0); }), ErrorCode::invalid_argument);
}

TEST(Ode, ClosedFormMatchesEigensolver) {
  for (int i = 0; i < 50; ++i) {
    const double gamma = std::pow(10.0, -2.0 + 4.0 * i / 49.0);
    const auto e = ode_eigs(gamma);
    const auto [a, b] = direct_eigs(gamma);
    const double tol = 1e-12 * std::max(1.0, gamma);
    const double err = std::min(
        std::max(std::abs(e.lambda_plus - a), std::abs(e.lambda_minus - b)),
        std::max(std::abs(e.lambda_plus - b), std::abs(e.lambda_minus - a)));
    EXPECT_LT(err, tol) << gamma;
    EXPECT_NEAR((e.lambda_plus * e.lambda_minus).real(), 1.0, 1e-12);
    EXPECT_NEAR((e.lambda_plus + e.lambda_minus).real(), gamma, 1e-12 * gamma);
    EXPECT_NEAR(e.gap, std::min(e.lambda_plus.real(), e.lambda_minus.real()), 1e-15);
  }
  EXPECT_NEAR(ode_gap(2.0 - 1e-10), 1.0, 1e-9);
  EXPECT_NEAR(ode_gap(2.0 + 1e-10), 1.0, 1e-4);
}

TEST(Ode, GapBranchesMeetAtTwo) {
  const double lo = 2.0 - 1e-9, hi = 2.0 + 1e-9;
  EXPECT_NEAR(lo / 2.0, 1.0, 1e-9);
  EXPECT_NEAR(2.0 / (hi + std::sqrt(hi * hi - 4.0)), 1.0, 1e-4);
  EXPECT_NEAR(ode_gap(lo), lo / 2.0, 1e-15);
  EXPECT_NEAR(ode_gap(hi), 2.0 / (hi + std::sqrt(hi * hi - 4.0)), 1e-15);
}

TEST(Ode, OptimalPCertificates) {
  const double g4 = 2.0 - std::sqrt(3.0);
  for (double gamma : {0.25, 0.5, 1.0, 1.5, 3.0, 4.0, 8.0}) {
    const auto r = ode_optimal_P(gamma);
    EXPECT_TRUE(r.cert) << gamma;
    EXPECT_GE(r.min_eig, -1e-10);
    EXPECT_NEAR(r.lambda, ode_gap(gamma), 1e-15);
    // |X(t)|_P^2 e^{2 lambda t} is non-increasing along exact trajectories
    for (double angle : {0.0, 0.7, 1.9, 3.0}) {
      std::array<double, 2> x0{std::cos(angle), std::sin(angle)};
      const auto traj = ode_trajectory(gamma, x0, 10.0, 1e-3);
      double prev = INFINITY;
      for (const auto& s : traj) {
        const Eigen::Vector2d x(s.x1, s.x2);
        const double v = x.dot(r.P * x) * std::exp(2.0 * r.lambda * s.t);
        EXPECT_LE(v, prev * (1.0 + 1e-9));
        prev = v;
      }
    }
  }
  EXPECT_NEAR(ode_optimal_P(4.0).lambda, g4, 1e-12);
  EXPECT_NEAR(ode_optimal_P(4.0).lambda, 0.2679492, 1e-7);
  EXPECT_EQ(code_of([] { ode_optimal_P(2.0); }), ErrorCode::defective_case);
}

TEST(Ode, PerturbativeP) {
  for (double gamma : {0.5, 1.0, 3.0}) {
    for (double eps : {0.0, 0.1, 0.5, 0.99}) {
      const auto r = ode_perturbative_P(gamma, eps);
      // -(PL + L^T P) in closed form, smallest eigenvalue of a symmetric 2x2
      const double a = 2.0 * eps, b = -eps * gamma, c = 2.0 * gamma - 2.0 * eps;
      const double mean = 0.5 * (a + c), rad = std::hypot(0.5 * (a - c), b);
      EXPECT_NEAR(r.min_eig_of_dissipation, mean - rad, 1e-12) << gamma << " " << eps;
    }
    EXPECT_NEAR(ode_perturbative_P(gamma, 0.0).min_eig_of_dissipation, 0.0, 1e-15);
    EXPECT_GT(ode_perturbative_P(gamma, 0.1).min_eig_of_dissipation, 0.0);
  }
  EXPECT_EQ(code_of([] { ode_perturbative_P(1.0, 1.0); }), ErrorCode::invalid_epsilon);
  EXPECT_EQ(code_of([] { ode_perturbative_P(1.0, -0.1); }), ErrorCode::invalid_epsilon);
}

TEST(Ode, TrajectoryMatchesPropagator) {
  const auto zero = ode_trajectory(0.5, {0.0, 0.0}, 5.0, 0.01);
  for (const auto& s : zero) {
    EXPECT_EQ(s.x1, 0.0);
    EXPECT_EQ(s.x2, 0.0);
  }
  const auto traj = ode_trajectory(0.5, {1.0, 1.0}, 40.0, 1e-3);
  EXPECT_NEAR(traj.back().t, 40.0, 1e-9);
  double worst = 0.0;
  for (const auto& s : traj) {
    const auto ex = underdamped_exact(0.5, {1.0, 1.0}, s.t);
    worst = std::max({worst, std::abs(s.x1 - ex[0]), std::abs(s.x2 - ex[1])});
    const auto lib = ode_exact(0.5, {1.0, 1.0}, s.t);
    EXPECT_NEAR(lib[0], ex[0], 1e-12);
  }
  EXPECT_LT(worst, 1e-8);
  EXPECT_NEAR(fit_envelope_decay(traj), 0.25, 0.01);
}

TEST(Ode, UnitPrefactorFailsWhenUnderdamped) {
  for (double gamma : {0.25, 0.5, 1.0, 1.5}) EXPECT_TRUE(ode_probe_unit_prefactor(gamma, 20.0).exceeds);
}
