// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hypokit/error.hpp"
#include "hypokit/estimators.hpp"
#include "hypokit/rng.hpp"
#include "hypokit/sde.hpp"

using namespace hypokit;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t stream) {
  RngStream rng(2024, stream);
  std::vector<double> x(n);
  rng.fill_normal(x);
  return x;
}

// AR(1) x' = rho x + sqrt(1 - rho^2) xi, stationary start; unit marginal
// variance, sigma2 = (1 + rho) / (1 - rho).
std::vector<double> ar1(std::size_t n, double rho, std::uint64_t stream) {
  auto xi = gaussian(n, stream);
  std::vector<double> x(n);
  x[0] = xi[0];
  const double s = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 1; i < n; ++i) x[i] = rho * x[i - 1] + s * xi[i];
  return x;
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

TEST(Estimators, ErgodicAverage) {
  EXPECT_DOUBLE_EQ(ergodic_average(std::vector<double>{1.0, 2.0, 3.0, 6.0}), 3.0);
  EXPECT_EQ(code_of([] { ergodic_average(std::vector<double>{}); }), ErrorCode::invalid_argument);
  // compensated summation keeps tiny increments on a large offset
  std::vector<double> x(1'000'000, 1e-8);
  x[0] = 1e8;
  EXPECT_NEAR(ergodic_average(x), (1e8 + 999'999 * 1e-8) / 1e6, 1e-12);
}

TEST(Estimators, IidUnitVariance) {
  const auto rep = asymptotic_variance_acf(gaussian(100'000, 0), 1.0);
  EXPECT_NEAR(rep.sigma2, 1.0, 0.1);
  EXPECT_LE(rep.ess, static_cast<double>(rep.n_samples));
  EXPECT_EQ(rep.method, VarianceMethod::acf_ips);
  EXPECT_FALSE(rep.constant_series);
}

TEST(Estimators, ConstantSeries) {
  std::vector<double> c(500, 2.5);
  const auto rep = asymptotic_variance_acf(c, 0.1);
  EXPECT_EQ(rep.sigma2, 0.0);
  EXPECT_TRUE(rep.constant_series);
  EXPECT_EQ(rep.mean, 2.5);
  const auto bm = batch_means_variance(c, 0.1, 10);
  EXPECT_EQ(bm.sigma2, 0.0);
}

TEST(Estimators, Ar1IntegratedAutocorrelation) {
  const auto rep = asymptotic_variance_acf(ar1(1'000'000, 0.9, 1), 1.0);
  EXPECT_NEAR(rep.sigma2 / 19.0, 1.0, 0.15);
  EXPECT_NEAR(rep.ess, 1e6 / 19.0, 0.15 * 1e6 / 19.0);
}

TEST(Estimators, SpacingScalesVariance) {
  const auto x = ar1(20'000, 0.5, 2);
  const auto a = asymptotic_variance_acf(x, 1.0);
  const auto b = asymptotic_variance_acf(x, 0.01);
  EXPECT_NEAR(b.sigma2, 0.01 * a.sigma2, 1e-15 * a.sigma2);
}

TEST(Estimators, ShortSeriesRejected) {
  EXPECT_EQ(code_of([] { asymptotic_variance_acf(std::vector<double>(99, 1.0), 1.0); }),
            ErrorCode::insufficient_data);
  EXPECT_EQ(code_of([] { batch_means_variance(std::vector<double>(100, 1.0), 1.0, 1); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { batch_means_variance(std::vector<double>(63, 1.0), 1.0, 32); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { asymptotic_variance_acf(std::vector<double>(200, 1.0), 0.0); }),
            ErrorCode::invalid_argument);
}

TEST(Estimators, BatchMeansIid) {
  const auto rep = batch_means_variance(gaussian(320'000, 3), 1.0, 32);
  EXPECT_NEAR(rep.sigma2, 1.0, 0.25);
  EXPECT_EQ(rep.window_or_batches, 32u);
  EXPECT_EQ(rep.method, VarianceMethod::batch_means);
}

TEST(Estimators, ScaleAndShift) {
  const auto x = ar1(50'000, 0.7, 4);
  const auto base = asymptotic_variance_acf(x, 0.5);
  std::vector<double> two(x), three(x), shifted(x);
  for (auto& v : two) v *= 2.0;
  for (auto& v : three) v *= 3.0;
  for (auto& v : shifted) v += 123.0;
  EXPECT_EQ(asymptotic_variance_acf(two, 0.5).sigma2, 4.0 * base.sigma2);
  EXPECT_NEAR(asymptotic_variance_acf(three, 0.5).sigma2, 9.0 * base.sigma2, 1e-12 * base.sigma2);
  const auto sh = asymptotic_variance_acf(shifted, 0.5);
  EXPECT_NEAR(sh.sigma2, base.sigma2, 1e-9 * base.sigma2);
  EXPECT_NEAR(sh.mean, base.mean + 123.0, 1e-9);
}

TEST(Estimators, CltConsistency) {
  // 50 independent AR(1) runs: the spread of sqrt(T) (mean - 0) matches the
  // reported sigma2.
  const std::size_t n = 100'000;
  double sum_sq = 0.0, sum_rep = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto rep = asymptotic_variance_acf(ar1(n, 0.8, 100 + k), 1.0);
    sum_sq += static_cast<double>(n) * rep.mean * rep.mean;
    sum_rep += rep.sigma2;
  }
  EXPECT_NEAR(sum_sq / 50.0, sum_rep / 50.0, 0.3 * sum_rep / 50.0);
}

TEST(Estimators, BatchMeansAgreesWithAcfOnLangevin) {
  auto cosine = builtin_potential("cosine", {{"h", 1.0}});
  EnsembleParams p;
  RngStream rng(8, 0);
  auto rec = simulate({{0.0}, {0.0}}, 2'000'000, 2, 0.01, Scheme::langevin,
                      {make_observable("cos", cosine, p)}, cosine, p, rng);
  const auto x = rec.column(0);
  const auto a = asymptotic_variance_acf(x, 0.02);
  const auto b = batch_means_variance(x, 0.02, 32);
  EXPECT_LT(std::max(a.sigma2 / b.sigma2, b.sigma2 / a.sigma2), 1.5);
}

TEST(Estimators, Sigma2StandardError) {
  const auto x = ar1(400'000, 0.5, 6);
  const double se = sigma2_standard_error(x, 1.0);
  EXPECT_GT(se, 0.0);
  EXPECT_LT(se, 0.3);  // sigma2 = 3
  const auto rep = asymptotic_variance_acf(x, 1.0);
  EXPECT_LT(std::abs(rep.sigma2 - 3.0), 4.0 * se);
}
