// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <thread>

#include "hypokit/error.hpp"
#include "hypokit/hypo.hpp"
#include "hypokit/sde.hpp"

namespace hypokit {

std::vector<double> geometric_gammas(double start, double ratio, std::size_t count) {
  if (!(start > 0.0) || !(ratio > 0.0) || count < 1)
    fail(ErrorCode::invalid_argument, "gamma range needs start > 0, ratio > 0, count >= 1");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = start * std::pow(ratio, static_cast<double>(i));
  return g;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return NAN;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingTable gamma_scan(const PotentialSpec& spec, const EnsembleParams& params_base,
                        const std::vector<double>& gammas, std::size_t Kq, std::size_t Np,
                        std::size_t n_quad, std::size_t max_threads) {
  if (gammas.size() < 7) fail(ErrorCode::invalid_argument, "a scan needs at least 7 gamma values");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) fail(ErrorCode::invalid_argument, "gamma values must be positive");
    if (i > 0 && !(gammas[i] > gammas[i - 1]))
      fail(ErrorCode::invalid_argument, "gamma values must be strictly increasing");
  }
  if (gammas.front() > 0.125 * (1 + 1e-12) || gammas.back() < 8.0 * (1 - 1e-12))
    fail(ErrorCode::invalid_argument, "gamma values must cover [1/8, 8]");

  EnsembleParams p = params_base;
  p.gamma = 1.0;
  const BasisSet basis = build_basis(spec, p, Kq, Np, n_quad);
  const GeneratorAssembly a = assemble_generator(basis, spec, p);

  ScalingTable t;
  t.rows.resize(gammas.size());
  const std::size_t workers = std::min(thread_budget(max_threads), gammas.size());
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < gammas.size(); i += workers) {
      ScanRow& r = t.rows[i];
      r.gamma = gammas[i];
      r.lower_model = std::min(r.gamma, 1.0 / r.gamma);
      try {
        r.gap = spectral_gap(a, r.gamma).gap;
        r.ok = r.gap > 0.0;
        if (!r.ok) r.error = "non-positive gap";
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<double> lx, ly, rx, ry;
  t.lambda_bar = INFINITY;
  t.complete = true;
  for (const auto& r : t.rows) {
    if (!r.ok) {
      t.complete = false;
      continue;
    }
    t.lambda_bar = std::min(t.lambda_bar, r.gap / r.lower_model);
    if (r.gamma <= 0.5 * (1 + 1e-12)) {
      lx.push_back(r.gamma);
      ly.push_back(r.gap);
    }
    if (r.gamma >= 2.0 * (1 - 1e-12)) {
      rx.push_back(r.gamma);
      ry.push_back(r.gap);
    }
  }
  t.n_left = lx.size();
  t.n_right = rx.size();
  t.slope_left = loglog_slope(lx, ly);
  t.slope_right = loglog_slope(rx, ry);
  if (!std::isfinite(t.lambda_bar)) t.lambda_bar = 0.0;
  return t;
}

}  // namespace hypokit
