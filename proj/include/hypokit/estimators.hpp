// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace hypokit {

enum class VarianceMethod { acf_ips, batch_means };

std::string_view to_string(VarianceMethod method) noexcept;

struct VarianceReport {
  double mean = 0.0;
  double sigma2 = 0.0;  // asymptotic variance, observable^2 * time
  double ess = 0.0;     // effective sample count, capped at n_samples
  VarianceMethod method = VarianceMethod::acf_ips;
  std::size_t window_or_batches = 0;  // truncation lag (acf) or batch count
  std::size_t n_samples = 0;
  double sample_variance = 0.0;
  bool constant_series = false;
};

double ergodic_average(std::span<const double> values);

/// Green-Kubo estimate with Geyer's initial positive sequence truncation:
///   sigma2 = spacing * (c_0 + 2 sum_{k=1}^{K} c_k),
/// where c_k are biased empirical autocovariances of the centered series and
/// K ends at the first non-positive pair sum c_{2j} + c_{2j+1}.
/// Requires at least 100 samples.
VarianceReport asymptotic_variance_acf(std::span<const double> values, double spacing);

/// sigma2 = spacing * b * Var(batch means) with b = floor(n / n_batches).
/// Trailing samples that do not fill a batch are dropped.
VarianceReport batch_means_variance(std::span<const double> values, double spacing,
                                    std::size_t n_batches);

/// Standard error of an acf_ips sigma2 estimate: the series is cut into
/// n_segments pieces, each piece is estimated separately, and the error is the
/// standard deviation of the piece estimates over sqrt(n_segments).
double sigma2_standard_error(std::span<const double> values, double spacing,
                             std::size_t n_segments = 16);

}  // namespace hypokit
