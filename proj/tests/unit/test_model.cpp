// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hypokit/error.hpp"
#include "hypokit/model.hpp"

using hypokit::builtin_potential;
using hypokit::ErrorCode;
using hypokit::PotentialSpec;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const hypokit::Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

struct Case {
  const char* name;
  json params;
  double lo, hi;
};

std::vector<Case> corpus() {
  return {
      {"flat", {{"d", 2}, {"L", 1.0}}, 0.0, 1.0},
      {"quadratic", {{"omega", 1.7}, {"d", 2}}, -3.0, 3.0},
      {"quadratic", {{"omega", 1.0}, {"L", 16.0}}, -7.0, 7.0},
      {"double_well", {{"a", 0.5}, {"b", 1.2}, {"d", 3}}, -2.0, 2.0},
      {"cosine", {{"h", 1.3}, {"modes", 2}, {"d", 2}, {"L", 1.0}}, -0.5, 1.5},
      {"separable",
       {{"parts", json::array({{{"name", "quadratic"}, {"params", {{"omega", 2.0}}}},
                               {{"name", "double_well"}, {"params", {{"a", 1.0}, {"b", 1.0}}}}})}},
       -2.0, 2.0},
  };
}

}  // namespace

TEST(Model, HamiltonianExamples) {
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 1.0}});
  hypokit::EnsembleParams p;
  EXPECT_DOUBLE_EQ(hypokit::eval_hamiltonian(flat, p, {{0.3}, {2.0}}), 2.0);
  auto quad = builtin_potential("quadratic", {{"omega", 1.0}});
  EXPECT_DOUBLE_EQ(hypokit::eval_hamiltonian(quad, p, {{1.0}, {1.0}}), 1.0);
  p.mass = 2.0;
  EXPECT_DOUBLE_EQ(hypokit::eval_hamiltonian(quad, p, {{0.0}, {2.0}}), 1.0);
  EXPECT_EQ(code_of([&] { hypokit::eval_hamiltonian(quad, p, {{0.0, 1.0}, {2.0, 1.0}}); }),
            ErrorCode::invalid_argument);
}

TEST(Model, BuiltinExamples) {
  auto quad = builtin_potential("quadratic", {{"omega", 1.0}});
  std::vector<double> g(1);
  quad.gradient(std::vector<double>{2.0}, g);
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  auto cosine = builtin_potential("cosine", {{"h", 1.0}, {"L", 1.0}});
  cosine.gradient(std::vector<double>{0.25}, g);
  EXPECT_NEAR(g[0], -2.0 * kPi, 1e-14);
  EXPECT_NEAR(cosine.value(std::vector<double>{0.5}), -1.0, 1e-15);
  EXPECT_TRUE(cosine.domain.is_torus());
  EXPECT_FALSE(quad.domain.is_torus());
}

TEST(Model, RejectsBadInput) {
  EXPECT_EQ(code_of([] { builtin_potential("morse", json::object()); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { builtin_potential("quadratic", json::object()); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { builtin_potential("cosine", {{"h", 1.0}, {"bogus", 1}}); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { builtin_potential("cosine", {{"h", 1.0}, {"modes", 1.5}}); }),
            ErrorCode::invalid_argument);
  auto cosine = builtin_potential("cosine", {{"h", 1.0}});
  EXPECT_NE(code_of([&] { hypokit::periodize(cosine, 2.0); }), static_cast<ErrorCode>(0));
}

TEST(Model, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 gen(7);
  for (const auto& c : corpus()) {
    const PotentialSpec spec = builtin_potential(c.name, c.params);
    const std::size_t d = spec.dim();
    std::uniform_real_distribution<double> u(c.lo, c.hi);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> q(d);
      for (auto& x : q) x = u(gen);
      std::vector<double> g(d), hs(d * d);
      spec.gradient(q, g);
      spec.hess(q, hs);
      const double step = 1e-5;
      for (std::size_t i = 0; i < d; ++i) {
        auto qp = q, qm = q;
        qp[i] += step;
        qm[i] -= step;
        const double fd = (spec.value(qp) - spec.value(qm)) / (2.0 * step);
        EXPECT_LE(std::abs(fd - g[i]), 1e-6 * std::max(1.0, std::abs(g[i])))
            << c.name << " grad " << i;
        std::vector<double> gp(d), gm(d);
        spec.gradient(qp, gp);
        spec.gradient(qm, gm);
        for (std::size_t j = 0; j < d; ++j) {
          const double fdh = (gp[j] - gm[j]) / (2.0 * step);
          EXPECT_LE(std::abs(fdh - hs[j * d + i]), 1e-5 * std::max(1.0, std::abs(hs[j * d + i])))
              << c.name << " hess " << i << "," << j;
        }
      }
      double lap = 0.0;
      for (std::size_t i = 0; i < d; ++i) lap += hs[i * d + i];
      EXPECT_NEAR(spec.laplacian(q), lap, 1e-12 * std::max(1.0, std::abs(lap)));
    }
  }
}

TEST(Model, TorusShiftInvariance) {
  auto cosine = builtin_potential("cosine", {{"h", 1.0}, {"modes", 3}, {"d", 2}, {"L", 2.0}});
  // dyadic points: the shifted argument wraps back to the same double
  for (double a : {0.0, 0.25, 0.5, 1.125, 1.75}) {
    for (double b : {0.0, 0.375, 1.5}) {
      std::vector<double> q{a, b}, q1{a + 2.0, b}, q2{a, b - 2.0};
      EXPECT_EQ(cosine.value(q), cosine.value(q1));
      EXPECT_EQ(cosine.value(q), cosine.value(q2));
    }
  }
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  auto quad = builtin_potential("quadratic", {{"omega", 1.0}, {"L", 16.0}});
  for (int i = 0; i < 100; ++i) {
    const double x = u(gen);
    std::vector<double> q{x}, qs{x + 16.0};
    EXPECT_NEAR(cosine.value(std::vector<double>{x, 0.1}),
                cosine.value(std::vector<double>{x + 2.0, 0.1}), 1e-12);
    EXPECT_NEAR(quad.value(q), quad.value(qs), 1e-12);
  }
}

TEST(Model, MinimumImage) {
  EXPECT_DOUBLE_EQ(hypokit::minimum_image(0.75, 1.0), -0.25);
  EXPECT_DOUBLE_EQ(hypokit::minimum_image(-0.25, 1.0), -0.25);
  EXPECT_DOUBLE_EQ(hypokit::minimum_image(0.5, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(hypokit::minimum_image(3.0, 16.0), 3.0);
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 1.0}});
  std::vector<double> q{2.25};
  flat.wrap(q);
  EXPECT_DOUBLE_EQ(q[0], 0.25);
}

TEST(Model, SeparableIsSumOfParts) {
  auto sep = builtin_potential(
      "separable",
      {{"parts", json::array({{{"name", "quadratic"}, {"params", {{"omega", 2.0}}}},
                              {{"name", "double_well"}, {"params", {{"a", 1.0}, {"b", 1.0}}}}})}});
  auto a = builtin_potential("quadratic", {{"omega", 2.0}});
  auto b = builtin_potential("double_well", {{"a", 1.0}, {"b", 1.0}});
  for (double x : {-1.3, 0.0, 0.7})
    for (double y : {-0.4, 1.1}) {
      EXPECT_EQ(sep.value(std::vector<double>{x, y}),
                a.value(std::vector<double>{x}) + b.value(std::vector<double>{y}));
    }
}

TEST(Model, ConditionConstantsClosedForms) {
  hypokit::EnsembleParams p;
  auto flat = builtin_potential("flat", {{"d", 1}, {"L", 1.0}});
  auto cc = hypokit::check_condition_constants(flat, p, hypokit::QuadratureGrid::torus(1.0, 1, 64), 0.5);
  EXPECT_EQ(cc.c1, 0.0);
  EXPECT_EQ(cc.c3, 0.0);
  EXPECT_TRUE(cc.feasible);

  // V = q^2/2 with c2 = 0: Laplacian 1 <= c1, |V''| / sqrt(1 + q^2) peaks at q = 0.
  auto quad = builtin_potential("quadratic", {{"omega", 1.0}});
  cc = hypokit::check_condition_constants(quad, p, hypokit::QuadratureGrid::box(-5, 5, 1, 1001), 0.0);
  EXPECT_NEAR(cc.c1, 1.0, 1e-14);
  EXPECT_NEAR(cc.c3, 1.0, 1e-14);

  // V = cos(2 pi q), c2 = 0: max of -4 pi^2 cos is 4 pi^2 at q = 1/2; the c3
  // ratio 4 pi^2 |cos| / sqrt(1 + 4 pi^2 sin^2) peaks at sin = 0.
  auto cosine = builtin_potential("cosine", {{"h", 1.0}});
  cc = hypokit::check_condition_constants(cosine, p, hypokit::QuadratureGrid::torus(1.0, 1, 10000), 0.0);
  EXPECT_NEAR(cc.c1, 4.0 * kPi * kPi, 1e-9);
  EXPECT_NEAR(cc.c3, 4.0 * kPi * kPi, 1e-9);

  // enlarging the grid never lowers the constants
  auto small = hypokit::check_condition_constants(quad, p, hypokit::QuadratureGrid::box(-1, 1, 1, 11), 0.3);
  auto big = hypokit::check_condition_constants(quad, p, hypokit::QuadratureGrid::box(-2, 2, 1, 21), 0.3);
  EXPECT_LE(small.c1, big.c1);
  EXPECT_LE(small.c3, big.c3);

  EXPECT_EQ(code_of([&] {
              hypokit::check_condition_constants(quad, p, hypokit::QuadratureGrid{}, 0.5);
            }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] {
              hypokit::check_condition_constants(quad, p, hypokit::QuadratureGrid::box(-1, 1, 1, 5), 1.5);
            }),
            ErrorCode::invalid_argument);
}
