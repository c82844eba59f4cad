// SPDX-License-Identifier: Apache-2.0
#include "hypokit/estimators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "hypokit/error.hpp"

namespace hypokit {

namespace {

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

std::size_t next_fast_size(std::size_t n) {
  std::size_t best = std::size_t{1} << static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
  for (std::size_t p3 = 1; p3 <= best; p3 *= 3)
    for (std::size_t p5 = p3; p5 <= best; p5 *= 5)
      for (std::size_t p = p5; p <= best; p *= 2)
        if (p >= n) {
          best = std::min(best, p);
          break;
        }
  return best;
}

// Biased autocovariances c_k = (1/n) sum_{t} x_t x_{t+k}, k = 0..n-1, of the
// already-centered series x via zero-padded real FFTs.
std::vector<double> autocovariance(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t nfft = next_fast_size(2 * n);
  const std::size_t nc = nfft / 2 + 1;
  std::unique_ptr<double, FftwFree> buf(static_cast<double*>(fftw_malloc(sizeof(double) * nfft)));
  std::unique_ptr<fftw_complex, FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc)));
  if (!buf || !spec) fail(ErrorCode::numerical_failure, "FFT buffer allocation failed");

  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), buf.get(), spec.get(), FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(nfft), spec.get(), buf.get(), FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), buf.get());
  std::fill(buf.get() + n, buf.get() + nfft, 0.0);
  fftw_execute(fwd);
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = spec.get()[k][0], im = spec.get()[k][1];
    spec.get()[k][0] = re * re + im * im;
    spec.get()[k][1] = 0.0;
  }
  fftw_execute(bwd);
  std::vector<double> c(n);
  const double scale = 1.0 / (static_cast<double>(nfft) * static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) c[k] = buf.get()[k] * scale;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  return c;
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

void check_spacing(double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    fail(ErrorCode::invalid_argument, "spacing must be positive and finite");
}

}  // namespace

std::string_view to_string(VarianceMethod method) noexcept {
  return method == VarianceMethod::acf_ips ? "acf_ips" : "batch_means";
}

double ergodic_average(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "cannot average an empty series");
  // Kahan sum.
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values.size());
}

VarianceReport asymptotic_variance_acf(std::span<const double> values, double spacing) {
  check_spacing(spacing);
  if (values.size() < 100)
    fail(ErrorCode::insufficient_data, "asymptotic variance needs at least 100 samples");
  VarianceReport r;
  r.method = VarianceMethod::acf_ips;
  r.n_samples = values.size();
  r.mean = ergodic_average(values);
  const double n = static_cast<double>(values.size());
  if (is_constant(values)) {
    r.constant_series = true;
    r.ess = n;
    return r;
  }

  std::vector<double> x(values.begin(), values.end());
  for (double& v : x) v -= r.mean;
  const std::vector<double> c = autocovariance(x);
  r.sample_variance = c[0];

  // Initial positive sequence: Gamma_j = c_{2j} + c_{2j+1} > 0.
  double sum = -c[0];  // c_0 + 2 sum_{k>=1} c_k = -c_0 + 2 sum_{j} Gamma_j
  std::size_t lag = 0;
  for (std::size_t j = 0; 2 * j + 1 < c.size(); ++j) {
    const double g = c[2 * j] + c[2 * j + 1];
    if (!(g > 0.0)) break;
    sum += 2.0 * g;
    lag = 2 * j + 1;
  }
  r.window_or_batches = lag;
  r.sigma2 = std::max(0.0, spacing * sum);
  r.ess = r.sigma2 > 0.0 ? std::min(n, n * r.sample_variance * spacing / r.sigma2) : n;
  return r;
}

VarianceReport batch_means_variance(std::span<const double> values, double spacing,
                                    std::size_t n_batches) {
  check_spacing(spacing);
  if (n_batches < 2) fail(ErrorCode::invalid_argument, "batch means needs at least 2 batches");
  if (values.size() < 2 * n_batches)
    fail(ErrorCode::invalid_argument, "batch means needs at least 2 samples per batch");
  VarianceReport r;
  r.method = VarianceMethod::batch_means;
  r.window_or_batches = n_batches;
  r.n_samples = values.size();
  r.mean = ergodic_average(values);
  const double n = static_cast<double>(values.size());
  if (is_constant(values)) {
    r.constant_series = true;
    r.ess = n;
    return r;
  }
  const std::size_t b = values.size() / n_batches;
  std::vector<double> means(n_batches);
  for (std::size_t i = 0; i < n_batches; ++i)
    means[i] = ergodic_average(values.subspan(i * b, b));
  const double grand = ergodic_average(means);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(n_batches - 1);

  double sv = 0.0;
  for (double v : values) sv += (v - r.mean) * (v - r.mean);
  r.sample_variance = sv / n;
  r.sigma2 = spacing * static_cast<double>(b) * var;
  r.ess = r.sigma2 > 0.0 ? std::min(n, n * r.sample_variance * spacing / r.sigma2) : n;
  return r;
}

double sigma2_standard_error(std::span<const double> values, double spacing,
                             std::size_t n_segments) {
  if (n_segments < 2) fail(ErrorCode::invalid_argument, "need at least 2 segments");
  const std::size_t len = values.size() / n_segments;
  if (len < 100) fail(ErrorCode::insufficient_data, "segments shorter than 100 samples");
  std::vector<double> est(n_segments);
  for (std::size_t i = 0; i < n_segments; ++i)
    est[i] = asymptotic_variance_acf(values.subspan(i * len, len), spacing).sigma2;
  const double m = ergodic_average(est);
  double var = 0.0;
  for (double e : est) var += (e - m) * (e - m);
  var /= static_cast<double>(n_segments - 1);
  return std::sqrt(var / static_cast<double>(n_segments));
}

}  // namespace hypokit
