// SPDX-License-Identifier: Apache-2.0
#include "hypokit/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "hypokit/error.hpp"

namespace hypokit {

namespace {

constexpr std::size_t kStackDims = 16;

// Runs f on a wrapped copy of q when the domain is a torus.
template <typename F>
auto with_wrapped(const Domain& domain, std::span<const double> q, F&& f) {
  if (!domain.is_torus()) return f(q);
  std::array<double, kStackDims> stack{};
  std::vector<double> heap;
  std::span<double> buf;
  if (q.size() <= kStackDims) {
    buf = std::span<double>(stack.data(), q.size());
  } else {
    heap.resize(q.size());
    buf = heap;
  }
  const double L = domain.length;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double x = q[i] - L * std::floor(q[i] / L);
    buf[i] = x >= L ? 0.0 : x;
  }
  return f(std::span<const double>(buf.data(), buf.size()));
}

double get_number(const nlohmann::json& params, const char* key) {
  if (!params.contains(key))
    fail(ErrorCode::invalid_argument, std::string("missing parameter '") + key + "'");
  const auto& v = params.at(key);
  if (!v.is_number())
    fail(ErrorCode::invalid_argument, std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

double get_number_or(const nlohmann::json& params, const char* key, double fallback) {
  return params.contains(key) ? get_number(params, key) : fallback;
}

std::size_t get_dim(const nlohmann::json& params) {
  const double d = get_number_or(params, "d", 1.0);
  if (d < 1.0 || d != std::floor(d) || d > 1e6)
    fail(ErrorCode::invalid_argument, "parameter 'd' must be a positive integer");
  return static_cast<std::size_t>(d);
}

void check_keys(const nlohmann::json& params, std::initializer_list<const char*> allowed,
                std::string_view name) {
  if (params.is_null()) return;
  if (!params.is_object())
    fail(ErrorCode::invalid_argument, "potential parameters must be a JSON object");
  for (const auto& [key, _] : params.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return key == k; });
    if (!known)
      fail(ErrorCode::invalid_argument,
           "unknown parameter '" + key + "' for potential '" + std::string(name) + "'");
  }
}

PotentialSpec make_flat(const nlohmann::json& params) {
  check_keys(params, {"d", "L"}, "flat");
  const std::size_t d = get_dim(params);
  const double L = get_number_or(params, "L", 1.0);
  PotentialSpec spec;
  spec.name = "flat";
  spec.domain = Domain::torus(L, d);
  spec.eval = [](std::span<const double>) { return 0.0; };
  spec.grad = [](std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
  };
  spec.hessian = [](std::span<const double>, std::span<double> h) {
    std::fill(h.begin(), h.end(), 0.0);
  };
  return spec;
}

PotentialSpec make_quadratic(const nlohmann::json& params) {
  check_keys(params, {"omega", "d", "L"}, "quadratic");
  const double omega = get_number(params, "omega");
  const std::size_t d = get_dim(params);
  const double k = omega * omega;
  PotentialSpec spec;
  spec.name = "quadratic";
  spec.domain = Domain::full_space(d);
  spec.eval = [k](std::span<const double> q) {
    double s = 0.0;
    for (double x : q) s += x * x;
    return 0.5 * k * s;
  };
  spec.grad = [k](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = k * q[i];
  };
  spec.hessian = [k, d](std::span<const double>, std::span<double> h) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) h[i * d + i] = k;
  };
  if (params.contains("L")) return periodize(spec, get_number(params, "L"));
  return spec;
}

PotentialSpec make_double_well(const nlohmann::json& params) {
  check_keys(params, {"a", "b", "d", "L"}, "double_well");
  const double a = get_number(params, "a");
  const double b = get_number(params, "b");
  const std::size_t d = get_dim(params);
  const double b2 = b * b;
  PotentialSpec spec;
  spec.name = "double_well";
  spec.domain = Domain::full_space(d);
  spec.eval = [a, b2](std::span<const double> q) {
    double s = 0.0;
    for (double x : q) s += (x * x - b2) * (x * x - b2);
    return a * s;
  };
  spec.grad = [a, b2](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = 4.0 * a * q[i] * (q[i] * q[i] - b2);
  };
  spec.hessian = [a, b2, d](std::span<const double> q, std::span<double> h) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) h[i * d + i] = 4.0 * a * (3.0 * q[i] * q[i] - b2);
  };
  if (params.contains("L")) return periodize(spec, get_number(params, "L"));
  return spec;
}

PotentialSpec make_cosine(const nlohmann::json& params) {
  check_keys(params, {"h", "modes", "d", "L"}, "cosine");
  const double h = get_number(params, "h");
  const double modes = get_number_or(params, "modes", 1.0);
  const std::size_t d = get_dim(params);
  const double L = get_number_or(params, "L", 1.0);
  if (modes < 1.0 || modes != std::floor(modes))
    fail(ErrorCode::invalid_argument, "parameter 'modes' must be a positive integer");
  const double w = 2.0 * std::numbers::pi * modes / L;
  PotentialSpec spec;
  spec.name = "cosine";
  spec.domain = Domain::torus(L, d);
  spec.eval = [h, w](std::span<const double> q) {
    double s = 0.0;
    for (double x : q) s += std::cos(w * x);
    return h * s;
  };
  spec.grad = [h, w](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = -h * w * std::sin(w * q[i]);
  };
  spec.hessian = [h, w, d](std::span<const double> q, std::span<double> hs) {
    std::fill(hs.begin(), hs.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) hs[i * d + i] = -h * w * w * std::cos(w * q[i]);
  };
  return spec;
}

PotentialSpec make_separable(const nlohmann::json& params) {
  check_keys(params, {"parts"}, "separable");
  if (!params.contains("parts") || !params.at("parts").is_array() || params.at("parts").empty())
    fail(ErrorCode::invalid_argument, "separable potential needs a non-empty 'parts' array");
  auto parts = std::make_shared<std::vector<PotentialSpec>>();
  for (const auto& entry : params.at("parts")) {
    if (!entry.is_object() || !entry.contains("name") || !entry.at("name").is_string())
      fail(ErrorCode::invalid_argument, "each separable part needs a 'name'");
    const nlohmann::json sub = entry.value("params", nlohmann::json::object());
    PotentialSpec part = builtin_potential(entry.at("name").get<std::string>(), sub);
    if (part.dim() != 1)
      fail(ErrorCode::invalid_argument, "separable parts must be one-dimensional");
    parts->push_back(std::move(part));
  }
  const bool torus = (*parts)[0].domain.is_torus();
  const double L = (*parts)[0].domain.length;
  for (const auto& part : *parts) {
    if (part.domain.is_torus() != torus || (torus && part.domain.length != L))
      fail(ErrorCode::invalid_argument,
           "separable parts must share one domain (all R, or all tori of equal length)");
  }
  const std::size_t d = parts->size();
  PotentialSpec spec;
  spec.name = "separable";
  spec.domain = torus ? Domain::torus(L, d) : Domain::full_space(d);
  spec.eval = [parts](std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < parts->size(); ++i) s += (*parts)[i].eval(q.subspan(i, 1));
    return s;
  };
  spec.grad = [parts](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < parts->size(); ++i)
      (*parts)[i].grad(q.subspan(i, 1), g.subspan(i, 1));
  };
  spec.hessian = [parts, d](std::span<const double> q, std::span<double> h) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      double hii = 0.0;
      (*parts)[i].hessian(q.subspan(i, 1), std::span<double>(&hii, 1));
      h[i * d + i] = hii;
    }
  };
  return spec;
}

}  // namespace

Domain Domain::torus(double length, std::size_t dim) {
  if (!(length > 0.0) || !std::isfinite(length))
    fail(ErrorCode::invalid_argument, "torus length must be positive");
  if (dim == 0) fail(ErrorCode::invalid_argument, "dimension must be positive");
  return Domain{Kind::torus, dim, length};
}

Domain Domain::full_space(std::size_t dim) {
  if (dim == 0) fail(ErrorCode::invalid_argument, "dimension must be positive");
  return Domain{Kind::full_space, dim, 0.0};
}

double PotentialSpec::value(std::span<const double> q) const {
  return with_wrapped(domain, q, [&](std::span<const double> x) { return eval(x); });
}

void PotentialSpec::gradient(std::span<const double> q, std::span<double> out) const {
  with_wrapped(domain, q, [&](std::span<const double> x) { grad(x, out); });
}

void PotentialSpec::hess(std::span<const double> q, std::span<double> out) const {
  with_wrapped(domain, q, [&](std::span<const double> x) { hessian(x, out); });
}

double PotentialSpec::laplacian(std::span<const double> q) const {
  const std::size_t d = dim();
  std::vector<double> h(d * d);
  hess(q, h);
  double tr = 0.0;
  for (std::size_t i = 0; i < d; ++i) tr += h[i * d + i];
  return tr;
}

void PotentialSpec::wrap(std::span<double> q) const {
  if (!domain.is_torus()) return;
  const double L = domain.length;
  for (double& x : q) {
    x -= L * std::floor(x / L);
    if (x >= L) x = 0.0;
  }
}

void EnsembleParams::validate(bool allow_zero_friction) const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorCode::invalid_argument, "beta must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass))
    fail(ErrorCode::invalid_argument, "mass must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    fail(ErrorCode::invalid_argument, "gamma must be non-negative");
  if (gamma == 0.0 && !allow_zero_friction)
    fail(ErrorCode::invalid_argument, "gamma = 0 is only allowed for Hamiltonian dynamics");
}

double eval_hamiltonian(const PotentialSpec& spec, const EnsembleParams& params,
                        const PhaseState& s) {
  if (s.q.size() != spec.dim() || s.p.size() != spec.dim())
    fail(ErrorCode::invalid_argument, "phase state dimension does not match the potential");
  double kinetic = 0.0;
  for (double x : s.p) kinetic += x * x;
  return spec.value(s.q) + kinetic / (2.0 * params.mass);
}

double minimum_image(double x, double length) noexcept {
  double y = x - length * std::floor(x / length + 0.5);
  if (y >= 0.5 * length) y -= length;
  return y;
}

PotentialSpec periodize(const PotentialSpec& spec, double length) {
  if (spec.domain.is_torus())
    fail(ErrorCode::invalid_argument, "potential '" + spec.name + "' is already periodic");
  const std::size_t d = spec.dim();
  PotentialSpec out;
  out.name = spec.name;
  out.domain = Domain::torus(length, d);
  auto image = [length](std::span<const double> q, std::span<double> buf) {
    for (std::size_t i = 0; i < q.size(); ++i) buf[i] = minimum_image(q[i], length);
  };
  out.eval = [inner = spec.eval, image, d](std::span<const double> q) {
    std::vector<double> x(d);
    image(q, x);
    return inner(x);
  };
  out.grad = [inner = spec.grad, image, d](std::span<const double> q, std::span<double> g) {
    std::vector<double> x(d);
    image(q, x);
    inner(x, g);
  };
  out.hessian = [inner = spec.hessian, image, d](std::span<const double> q, std::span<double> h) {
    std::vector<double> x(d);
    image(q, x);
    inner(x, h);
  };
  return out;
}

PotentialSpec builtin_potential(std::string_view name, const nlohmann::json& params) {
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  if (name == "flat") return make_flat(p);
  if (name == "quadratic") return make_quadratic(p);
  if (name == "double_well") return make_double_well(p);
  if (name == "cosine") return make_cosine(p);
  if (name == "separable") return make_separable(p);
  fail(ErrorCode::invalid_argument, "unknown potential '" + std::string(name) + "'");
}

QuadratureGrid QuadratureGrid::torus(double length, std::size_t dim, std::size_t per_dim) {
  QuadratureGrid grid;
  grid.dim = dim;
  if (dim == 0 || per_dim == 0) return grid;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= per_dim;
  grid.points.resize(total * dim);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = 0; k < dim; ++k) {
      grid.points[idx * dim + k] = length * static_cast<double>(rest % per_dim) / per_dim;
      rest /= per_dim;
    }
  }
  return grid;
}

QuadratureGrid QuadratureGrid::box(double lo, double hi, std::size_t dim, std::size_t per_dim) {
  if (!(hi > lo)) fail(ErrorCode::invalid_argument, "box grid needs hi > lo");
  QuadratureGrid grid;
  grid.dim = dim;
  if (dim == 0 || per_dim == 0) return grid;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= per_dim;
  grid.points.resize(total * dim);
  const double h = per_dim > 1 ? (hi - lo) / static_cast<double>(per_dim - 1) : 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t k = 0; k < dim; ++k) {
      grid.points[idx * dim + k] = lo + h * static_cast<double>(rest % per_dim);
      rest /= per_dim;
    }
  }
  return grid;
}

ConditionConstants check_condition_constants(const PotentialSpec& spec,
                                             const EnsembleParams& params,
                                             const QuadratureGrid& grid, double c2) {
  params.validate(true);
  if (grid.size() == 0) fail(ErrorCode::invalid_argument, "condition check needs a non-empty grid");
  if (grid.dim != spec.dim())
    fail(ErrorCode::invalid_argument, "grid dimension does not match the potential");
  if (!(c2 >= 0.0 && c2 <= 1.0)) fail(ErrorCode::invalid_argument, "c2 must lie in [0, 1]");
  if (!spec.hessian) fail(ErrorCode::invalid_argument, "potential has no Hessian");

  const std::size_t d = spec.dim();
  const double dd = static_cast<double>(d);
  std::vector<double> g(d), h(d * d);
  double c1 = 0.0;
  double c3sq = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto q = grid.point(i);
    spec.gradient(q, g);
    spec.hess(q, h);
    double grad2 = 0.0;
    for (double x : g) grad2 += x * x;
    double lap = 0.0;
    for (std::size_t k = 0; k < d; ++k) lap += h[k * d + k];
    double frob = 0.0;
    for (double x : h) frob += x * x;
    c1 = std::max(c1, (lap - 0.5 * c2 * params.beta * grad2) / dd);
    c3sq = std::max(c3sq, frob / (dd + grad2));
    if (!std::isfinite(lap) || !std::isfinite(frob) || !std::isfinite(grad2)) {
      c1 = std::numeric_limits<double>::infinity();
      c3sq = std::numeric_limits<double>::infinity();
    }
  }
  ConditionConstants out;
  out.c1 = c1;
  out.c3 = std::sqrt(c3sq);
  out.feasible = std::isfinite(out.c1) && std::isfinite(out.c3);
  return out;
}

}  // namespace hypokit
