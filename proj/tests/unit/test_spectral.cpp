// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hypokit/error.hpp"
#include "hypokit/spectral.hpp"
#include "support/oracles.hpp"

using namespace hypokit;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// f_k with the documented ordering, evaluated directly.
double fourier(std::size_t k, double q, double L, bool derivative) {
  if (k == 0) return derivative ? 0.0 : 1.0;
  const double w = 2.0 * kPi * static_cast<double>((k + 1) / 2) / L;
  if (k % 2 == 1) return derivative ? -std::sqrt(2.0) * w * std::sin(w * q) : std::sqrt(2.0) * std::cos(w * q);
  return derivative ? std::sqrt(2.0) * w * std::cos(w * q) : std::sqrt(2.0) * std::sin(w * q);
}

// Momentum integrals against the Gaussian with variance m / beta by the
// trapezoid rule on +-14 standard deviations; derivatives by central
// differences.
struct MomentumTables {
  Matrix p_mul;  // <h_i, p h_j>
  Matrix d_p;    // <h_i, h_j'>
  Matrix dd;     // <h_i', h_j'>
};

MomentumTables momentum_tables(std::size_t n, double beta, double mass) {
  const double sd = std::sqrt(mass / beta);
  const int pts = 6001;
  const double lo = -14.0 * sd, dx = 28.0 * sd / (pts - 1);
  const double step = 1e-5 * sd;
  MomentumTables t{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int s = 0; s < pts; ++s) {
    const double p = lo + dx * s;
    const double w = dx * std::exp(-0.5 * p * p / (sd * sd)) / (sd * std::sqrt(2.0 * kPi));
    const auto h = hermite_functions(n, p, beta, mass);
    const auto hp = hermite_functions(n, p + step, beta, mass);
    const auto hm = hermite_functions(n, p - step, beta, mass);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double dj = (hp[j] - hm[j]) / (2.0 * step);
        const double di = (hp[i] - hm[i]) / (2.0 * step);
        t.p_mul(i, j) += w * h[i] * p * h[j];
        t.d_p(i, j) += w * h[i] * dj;
        t.dd(i, j) += w * di * dj;
      }
  }
  return t;
}

// <f_k' h_n', L_ham (f_k h_n)> from the strong form (p/m) d/dq - V' d/dp,
// position integrals on a trapezoid grid of n_fine points with weight
// exp(-beta V), divided by the partition function of that weight.
Matrix strong_form_ham(const PotentialSpec& spec, const EnsembleParams& prm, std::size_t Kq,
                       std::size_t Np, std::size_t n_fine) {
  const double L = spec.domain.length;
  const std::size_t nq = 2 * Kq + 1;
  Matrix q1 = Matrix::Zero(nq, nq), q2 = Matrix::Zero(nq, nq);
  double z = 0.0;
  std::vector<double> g(1);
  for (std::size_t s = 0; s < n_fine; ++s) {
    const double q = L * static_cast<double>(s) / static_cast<double>(n_fine);
    const std::vector<double> qq{q};
    spec.gradient(qq, g);
    const double w = std::exp(-prm.beta * spec.value(qq)) * L / static_cast<double>(n_fine);
    z += w;
    for (std::size_t a = 0; a < nq; ++a)
      for (std::size_t b = 0; b < nq; ++b) {
        q1(a, b) += w * fourier(a, q, L, false) * fourier(b, q, L, true);
        q2(a, b) += w * fourier(a, q, L, false) * fourier(b, q, L, false) * g[0];
      }
  }
  const auto mt = momentum_tables(Np, prm.beta, prm.mass);
  Matrix out(nq * Np, nq * Np);
  for (std::size_t n1 = 0; n1 < Np; ++n1)
    for (std::size_t n2 = 0; n2 < Np; ++n2)
      out.block(n1 * nq, n2 * nq, nq, nq) =
          (mt.p_mul(n1, n2) / prm.mass) * q1 - mt.d_p(n1, n2) * q2;
  return out / z;
}

PotentialSpec cosine(double h = 1.0, int modes = 1, double L = 1.0) {
  return builtin_potential("cosine", {{"h", h}, {"modes", modes}, {"L", L}});
}

}  // namespace

TEST(Basis, HermiteFunctionsMatchPolynomials) {
  const double beta = 2.0, m = 0.5;
  for (double p : {-1.3, 0.0, 0.4, 2.2}) {
    const double x = p * std::sqrt(beta / m);
    const auto h = hermite_functions(4, p, beta, m);
    EXPECT_DOUBLE_EQ(h[0], 1.0);
    EXPECT_NEAR(h[1], x, 1e-14);
    EXPECT_NEAR(h[2], (x * x - 1.0) / std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(h[3], (x * x * x - 3.0 * x) / std::sqrt(6.0), 1e-13);
  }
}

TEST(Basis, FlatGramIsLengthTimesIdentity) {
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 2.0}});
  const auto b = build_basis(flat, {}, 5, 3, 64);
  EXPECT_LT(max_abs(b.gram_q - 2.0 * Matrix::Identity(11, 11)), 1e-13);
  EXPECT_NEAR(b.partition_function(), 2.0, 1e-14);
}

TEST(Basis, LadderIdentity) {
  const double beta = 2.0, m = 0.5;
  const auto mt = momentum_tables(8, beta, m);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      EXPECT_NEAR(mt.dd(i, j) / beta, i == j ? i / m : 0.0, 1e-7) << i << "," << j;
}

TEST(Basis, QuadratureDoublingIsConverged) {
  auto v = cosine(1.0, 1, 1.0);
  const auto a = build_basis(v, {}, 8, 2, 128);
  const auto b = build_basis(v, {}, 8, 2, 256);
  EXPECT_LT(max_abs(a.gram_q - b.gram_q), 1e-12);
}

TEST(Basis, Preconditions) {
  auto quad = builtin_potential("quadratic", {{"omega", 1.0}});
  EXPECT_EQ(code_of([&] { build_basis(quad, {}, 4, 4, 64); }), ErrorCode::unsupported_domain);
  EXPECT_EQ(code_of([&] { build_basis(cosine(), {}, 16, 4, 64); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] {
              auto b = build_basis(cosine(), {1e4, 1.0, 1.0}, 16, 4, 256);
              assemble_generator(b, cosine(), {1e4, 1.0, 1.0});
            }),
            ErrorCode::ill_conditioned_basis);
}

TEST(Assembly, MatchesStrongForm) {
  struct Setup {
    PotentialSpec v;
    EnsembleParams prm;
  };
  std::vector<Setup> setups{{cosine(), {1.0, 1.0, 1.0}}, {cosine(0.7, 2, 1.5), {2.0, 1.5, 1.0}}};
  for (const auto& s : setups) {
    const auto basis = build_basis(s.v, s.prm, 4, 6, 128);
    const auto a = assemble_generator(basis, s.v, s.prm);
    const Matrix oracle = strong_form_ham(s.v, s.prm, 4, 6, 512);
    const Matrix lib = a.L_ham / basis.partition_function();
    EXPECT_LT(max_abs(lib - oracle), 1e-8 * max_abs(oracle));

    // Invariance of mu: int L e_j dmu = <1, L e_j> vanishes for every e_j.
    EXPECT_LT(oracle.row(0).cwiseAbs().maxCoeff(), 1e-10 * max_abs(oracle));
  }
}

TEST(Assembly, StructuralInvariants) {
  auto v = cosine();
  EnsembleParams prm{1.0, 1.0, 1.0};
  const auto basis = build_basis(v, prm, 16, 32, 256);
  const auto a = assemble_generator(basis, v, prm);
  const double scale = max_abs(a.L_ham);
  EXPECT_LT(max_abs(a.L_ham + a.L_ham.transpose()), 1e-10 * scale);
  EXPECT_LT(max_abs(a.L_FD - a.L_FD.transpose()), 1e-10 * scale);
  const Vector fd_eigs = linalg::symmetric_eigenvalues(a.L_FD);
  EXPECT_LE(fd_eigs.maxCoeff(), 1e-10 * scale);

  // operator form: M^T G + G M = 2 gamma L_FD, zero for the Hamiltonian part
  const Matrix g = a.gram;
  const Matrix m_ham = g.ldlt().solve(a.L_ham);
  EXPECT_LT(max_abs(m_ham.transpose() * g + g * m_ham), 1e-9 * scale);

  // constants are in the kernel
  const Matrix op = a.operator_matrix();
  EXPECT_LT(op.col(0).cwiseAbs().maxCoeff(), 1e-12 * scale);

  // the symmetric part is degenerate exactly on Hermite level 0
  const std::size_t nq = basis.nq();
  std::size_t zero = 0;
  for (Eigen::Index i = 0; i < fd_eigs.size(); ++i)
    if (std::abs(fd_eigs[i]) < 1e-8 * scale) ++zero;
  EXPECT_EQ(zero, nq);
}

TEST(Spectral, QuadraticGapMatchesDriftMatrix) {
  auto quad = builtin_potential("quadratic", {{"omega", 1.0}, {"L", 16.0}});
  EnsembleParams prm{1.0, 1.0, 0.5};
  const auto basis = build_basis(quad, prm, 16, 40, 256);
  auto a = assemble_generator(basis, quad, prm);
  for (double gamma : {0.5, 4.0}) {
    const auto r = spectral_gap(a, gamma);
    EXPECT_NEAR(r.gap, oracle::ou_gap(1.0, 1.0, gamma), 1e-6) << gamma;
    const auto adj = spectral_gap(a, gamma, true);
    EXPECT_NEAR(adj.gap, r.gap, 1e-9) << gamma;
  }
  EXPECT_EQ(code_of([&] { spectral_gap(a, 0.0); }), ErrorCode::invalid_argument);
}

TEST(Spectral, ProjectionReproducesBasisFunctions) {
  auto v = cosine();
  const auto basis = build_basis(v, {}, 4, 5, 128);
  for (std::size_t idx : {0u, 3u, 9u, 23u, 44u}) {
    const Vector c = project_observable(
        basis, [&](double q, double p) { return basis_function(basis, idx, q, p); });
    for (Eigen::Index i = 0; i < c.size(); ++i)
      EXPECT_NEAR(c[i], static_cast<std::size_t>(i) == idx ? 1.0 : 0.0, 1e-10);
  }
  const Vector cq = project_observable_q(basis, [](double q) { return std::cos(2.0 * kPi * q); });
  EXPECT_NEAR(cq[1], 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Poisson, ConstantObservableHasZeroVariance) {
  auto v = cosine();
  EnsembleParams prm;
  const auto basis = build_basis(v, prm, 6, 8, 128);
  const auto a = assemble_generator(basis, v, prm);
  const auto r = solve_poisson(a, project_observable_q(basis, [](double) { return 3.0; }));
  EXPECT_NEAR(r.sigma2, 0.0, 1e-12);
}

TEST(Poisson, OrnsteinUhlenbeckPositionVariance) {
  for (auto [m, beta, gamma] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{1.0, 1.0, 2.5},
                                std::tuple{0.5, 2.0, 1.0}}) {
    // box wide enough for the Gaussian tails, narrow enough for a well-conditioned Gram
    const double L = beta > 1.0 ? 10.0 : 16.0;
    auto quad = builtin_potential("quadratic", {{"omega", 1.0}, {"L", L}});
    EnsembleParams prm{beta, m, gamma};
    const auto basis = build_basis(quad, prm, 16, 40, 256);
    const auto a = assemble_generator(basis, quad, prm);
    const auto r = solve_poisson(a, project_observable_q(basis, [L](double q) {
                                   return minimum_image(q, L);
                                 }));
    const double exact = oracle::ou_sigma2_q(1.0, m, beta, gamma);
    EXPECT_NEAR(r.sigma2, exact, 1e-6 * exact) << m << " " << beta << " " << gamma;
  }
}

TEST(Overdamped, FlatEigenvaluesAndSymmetry) {
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 2.0}});
  EnsembleParams prm{2.0, 1.0, 1.0};
  const auto basis = build_basis(flat, prm, 5, 1, 64);
  const auto o = assemble_overdamped(basis, flat, prm);
  const Matrix op = o.gram_q.ldlt().solve(o.L_ovd);
  for (std::size_t k = 1; k < 11; ++k) {
    const double w = 2.0 * kPi * static_cast<double>((k + 1) / 2) / 2.0;
    EXPECT_NEAR(op(k, k), -w * w / 2.0, 1e-11);
  }
  auto v = cosine();
  const auto cb = build_basis(v, prm, 16, 1, 256);
  const auto co = assemble_overdamped(cb, v, prm);
  EXPECT_LT(max_abs(co.L_ovd - co.L_ovd.transpose()), 1e-10 * max_abs(co.L_ovd));
  EXPECT_LT(co.L_ovd.col(0).cwiseAbs().maxCoeff(), 1e-12 * max_abs(co.L_ovd));
}

TEST(Overdamped, PoincareConstants) {
  auto flat1 = builtin_potential("flat", {{"d", 1}, {"L", 1.0}});
  auto flat2 = builtin_potential("flat", {{"d", 1}, {"L", 2.0}});
  EXPECT_NEAR(poincare_constant(flat1, {1.0, 1.0, 1.0}, 8), 4.0 * kPi * kPi, 1e-10);
  EXPECT_NEAR(poincare_constant(flat1, {3.0, 1.0, 1.0}, 8), 4.0 * kPi * kPi, 1e-10);
  EXPECT_NEAR(poincare_constant(flat2, {1.0, 1.0, 1.0}, 8), kPi * kPi, 1e-10);

  auto v = cosine();
  const double fd = oracle::fd_poincare([&](double q) { return v.value(std::vector<double>{q}); },
                                        1.0, 1.0, 4096);
  const double r = poincare_constant(v, {1.0, 1.0, 1.0}, 32);
  EXPECT_NEAR(r / fd, 1.0, 5e-3);
}

TEST(Overdamped, SemigroupDecay) {
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 1.0}});
  EnsembleParams prm;
  const auto basis = build_basis(flat, prm, 8, 1, 128);
  const auto o = assemble_overdamped(basis, flat, prm);
  const double R = 4.0 * kPi * kPi;
  const auto d = semigroup_decay_check(o.L_ovd, o.gram_q, R, 1.0, {0.0, 0.1});
  EXPECT_NEAR(d.norms[0], 1.0, 1e-12);
  EXPECT_NEAR(d.norms[1], std::exp(-0.4 * kPi * kPi), 1e-12);
  EXPECT_TRUE(d.holds);

  auto v = cosine();
  const auto cb = build_basis(v, prm, 16, 1, 256);
  const auto co = assemble_overdamped(cb, v, prm);
  const double rc = poincare_constant(v, prm, 16);
  EXPECT_TRUE(semigroup_decay_check(co.L_ovd, co.gram_q, rc, 1.0, {0.01, 0.1, 1.0}).holds);
  // a rate above R_nu must be caught
  EXPECT_FALSE(semigroup_decay_check(co.L_ovd, co.gram_q, 1.1 * rc, 1.0, {0.1}).holds);
}

TEST(Overdamped, FlatPoissonVariance) {
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 1.0}});
  EnsembleParams prm;
  const auto basis = build_basis(flat, prm, 8, 1, 128);
  const auto o = assemble_overdamped(basis, flat, prm);
  const auto r = solve_poisson_overdamped(
      o, project_observable_q(basis, [](double q) { return std::cos(2.0 * kPi * q); }));
  EXPECT_NEAR(r.sigma2, 1.0 / (4.0 * kPi * kPi), 1e-8);
}
