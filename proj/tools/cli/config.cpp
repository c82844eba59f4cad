// SPDX-License-Identifier: Apache-2.0
#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace hypokit::cli {

namespace {

using K = FieldKind;

const std::vector<Field> kFields = {
    {"potential", "/potential/name", K::text, "--potential", "built-in potential name"},
    {"params", "/potential/params", K::object, "--params", "potential parameters as a JSON object"},
    {"beta", "/ensemble/beta", K::real, "--beta", "inverse temperature"},
    {"mass", "/ensemble/mass", K::real, "--mass", "particle mass"},
    {"gamma", "/ensemble/gamma", K::real, "--gamma", "friction"},
    {"Kq", "/discretization/Kq", K::integer, "--Kq", "Fourier modes per sign"},
    {"Np", "/discretization/Np", K::integer, "--Np", "Hermite levels"},
    {"n_quad", "/discretization/n_quad", K::integer, "--n-quad", "position quadrature points"},
    {"box", "/discretization/box", K::real, "--box",
     "period used to wrap full-space potentials onto a torus"},
    {"dt", "/discretization/dt", K::real, "--dt", "time step"},
    {"n_steps", "/discretization/n_steps", K::integer, "--n-steps", "number of steps"},
    {"stride", "/discretization/stride", K::integer, "--stride", "record every stride steps"},
    {"scheme", "/discretization/scheme", K::text, "--scheme", "langevin, overdamped or hamiltonian"},
    {"observables", "/options/observables", K::text_list, "--observables",
     "comma list of q, p, q2, p2, cos, sin, V, H, flux"},
    {"q0", "/options/q0", K::real_list, "--q0", "initial positions", true},
    {"p0", "/options/p0", K::real_list, "--p0", "initial momenta", true},
    {"input", "/options/input", K::text, "--input", "trajectory CSV"},
    {"column", "/options/column", K::text, "--column", "column to analyse (default: all)"},
    {"spacing", "/options/spacing", K::real, "--spacing",
     "time between samples (default: from the time column)", true},
    {"batches", "/options/batches", K::integer, "--batches", "number of batches"},
    {"observable", "/options/observable", K::text, "--observable", "observable for the Poisson solve"},
    {"overdamped", "/options/overdamped", K::boolean, "--overdamped", "use the overdamped generator"},
    {"refine", "/options/refine", K::boolean, "--refine",
     "check convergence against a 1.5x larger basis instead of a 2/3 smaller one"},
    {"adjoint", "/options/adjoint", K::boolean, "--adjoint", "use the Fokker-Planck operator"},
    {"times", "/options/times", K::real_list, "--times", "times for the semigroup decay check"},
    {"x0", "/options/x0", K::real_list, "--x0", "initial condition X1,X2"},
    {"T", "/options/T", K::real, "--T", "final time"},
    {"figure1", "/options/figure1", K::boolean, "--figure1",
     "gamma = 0.5, X(0) = (1,1), T = 40 damped-oscillation table"},
    {"epsilon", "/options/epsilon", K::real, "--epsilon", "norm modification (default: tuned)", true},
    {"tol", "/options/tol", K::real, "--tol", "epsilon tuning tolerance"},
    {"case", "/options/case", K::text, "--case", "convex, hessian or general"},
    {"K", "/options/K", K::real, "--K", "Hessian lower bound -K (default: from the grid)", true},
    {"c_prime", "/options/c_prime", K::real, "--c-prime", "constant C' for the general case"},
    {"slack", "/options/slack", K::real, "--slack", "relative discretization slack"},
    {"c2", "/options/c2", K::real, "--c2", "constant c2 in [0, 1] for the Laplacian condition"},
    {"grid_points", "/options/grid_points", K::integer, "--grid-points",
     "grid points per dimension for the condition constants"},
    {"gammas", "/options/gammas", K::text, "--gammas", "start:ratio:count or a comma list"},
    {"seed", "/seed", K::integer, "--seed", "random seed"},
    {"stream", "/stream", K::integer, "--stream", "random stream id"},
    {"output_path", "/output_path", K::text, "--out", "CSV output path"},
    {"report_path", "/report_path", K::text, "--report", "JSON report path"},
};

const std::vector<std::string> kPotential = {"potential", "params", "beta", "mass", "gamma"};
const std::vector<std::string> kBasis = {"Kq", "Np", "n_quad", "box"};

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::map<std::string, std::vector<std::string>, std::less<>>& command_table() {
  static const std::map<std::string, std::vector<std::string>, std::less<>> t = {
      {"sample", join({kPotential,
                       {"dt", "n_steps", "stride", "scheme", "observables", "q0", "p0", "seed",
                        "stream", "output_path", "report_path"}})},
      {"variance", {"input", "column", "spacing", "batches", "report_path"}},
      {"spectrum", join({kPotential, kBasis, {"refine", "adjoint", "output_path", "report_path"}})},
      {"poisson", join({kPotential, kBasis, {"observable", "overdamped", "report_path"}})},
      {"poincare", join({{"potential", "params", "beta", "Kq", "n_quad", "box", "times",
                          "report_path"}})},
      {"ode", {"gamma", "dt", "x0", "T", "figure1", "epsilon", "output_path", "report_path"}},
      {"dissipation", join({kPotential, kBasis, {"epsilon", "tol", "report_path"}})},
      {"bounds", join({kPotential, kBasis,
                       {"case", "K", "c_prime", "slack", "c2", "grid_points", "report_path"}})},
      {"scan", join({{"potential", "params", "beta", "mass"}, kBasis,
                     {"gammas", "output_path", "report_path"}})},
  };
  return t;
}

const std::map<std::string, json, std::less<>>& defaults() {
  static const std::map<std::string, json, std::less<>> d = {
      {"potential", "cosine"},
      {"params", json::object()},
      {"beta", 1.0},
      {"mass", 1.0},
      {"gamma", 1.0},
      {"Kq", 16},
      {"Np", 32},
      {"n_quad", 256},
      {"box", 16.0},
      {"dt", 0.01},
      {"n_steps", 100000},
      {"stride", 10},
      {"scheme", "langevin"},
      {"observables", json::array({"q", "p"})},
      {"q0", nullptr},
      {"p0", nullptr},
      {"input", ""},
      {"column", ""},
      {"spacing", nullptr},
      {"batches", 32},
      {"observable", "cos"},
      {"overdamped", false},
      {"refine", false},
      {"adjoint", false},
      {"times", json::array({0.01, 0.1, 1.0})},
      {"x0", json::array({1.0, 1.0})},
      {"T", 40.0},
      {"figure1", false},
      {"epsilon", nullptr},
      {"tol", 1e-3},
      {"case", "hessian"},
      {"K", nullptr},
      {"c_prime", 0.0},
      {"slack", 0.05},
      {"c2", 0.5},
      {"grid_points", 2048},
      {"gammas", "0.125:2:7"},
      {"seed", 0},
      {"stream", 0},
      {"output_path", ""},
      {"report_path", ""},
  };
  return d;
}

bool kind_matches(FieldKind k, const json& v) {
  switch (k) {
    case K::real: return v.is_number();
    case K::integer: return v.is_number_integer() && v.get<long long>() >= 0;
    case K::text: return v.is_string();
    case K::boolean: return v.is_boolean();
    case K::object: return v.is_object();
    case K::real_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
    case K::text_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); });
  }
  return false;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw ConfigError("invalid number '" + s + "' for " + what);
  return v;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"sample",      "variance", "spectrum",
                                                 "poisson",     "poincare", "ode",
                                                 "dissipation", "bounds",   "scan"};
  return names;
}

const std::vector<Field>& all_fields() { return kFields; }

const std::vector<std::string>& command_fields(std::string_view command) {
  const auto& t = command_table();
  const auto it = t.find(command);
  if (it == t.end()) throw ConfigError("unknown subcommand '" + std::string(command) + "'");
  return it->second;
}

const Field& field(std::string_view key) {
  for (const auto& f : kFields)
    if (f.key == key) return f;
  throw ConfigError("unknown field '" + std::string(key) + "'");
}

json default_config(std::string_view command) {
  json cfg = json::object();
  cfg["command"] = std::string(command);
  for (const auto& key : command_fields(command))
    cfg[json::json_pointer(field(key).pointer)] = defaults().at(key);
  return cfg;
}

void validate_config(std::string_view command, const json& cfg) {
  if (!cfg.is_object()) throw ConfigError("configuration must be a JSON object");
  const auto& keys = command_fields(command);
  // Every leaf the schema knows about; potential params are free-form.
  const json flat = cfg.flatten();
  for (const auto& item : flat.items()) {
    std::string ptr = item.key();
    if (ptr.empty()) continue;  // empty configuration
    if (ptr == "/command") {
      if (!item.value().is_string() || item.value().get<std::string>() != command)
        throw ConfigError("config 'command' does not match the subcommand");
      continue;
    }
    if (ptr.rfind("/potential/params", 0) == 0) ptr = "/potential/params";
    const Field* match = nullptr;
    for (const auto& f : kFields) {
      if (ptr == f.pointer || (ptr.rfind(f.pointer + "/", 0) == 0 &&
                               (f.kind == K::real_list || f.kind == K::text_list))) {
        match = &f;
        break;
      }
    }
    if (!match) throw ConfigError("unknown configuration key '" + item.key() + "'");
    if (std::find(keys.begin(), keys.end(), match->key) == keys.end())
      throw ConfigError("key '" + match->key + "' does not apply to '" + std::string(command) + "'");
  }
  for (const auto& key : keys) {
    const Field& f = field(key);
    const json::json_pointer p(f.pointer);
    if (!cfg.contains(p)) continue;
    const json& v = cfg.at(p);
    if (v.is_null() && f.nullable) continue;
    if (!kind_matches(f.kind, v)) throw ConfigError("key '" + key + "' has the wrong type");
  }
  for (const char* section : {"potential", "ensemble", "discretization", "options"})
    if (cfg.contains(section) && !cfg.at(section).is_object())
      throw ConfigError(std::string("section '") + section + "' must be an object");
}

json merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (const auto& [k, v] : over.items()) {
    if (base.contains(k) && base[k].is_object() && v.is_object() && k != "params")
      base[k] = merge(base[k], v);
    else
      base[k] = v;
  }
  return base;
}

json parse_flag_value(const Field& f, const std::string& text) {
  switch (f.kind) {
    case K::real: return to_real(text, f.flag);
    case K::integer: {
      const double v = to_real(text, f.flag);
      if (v < 0 || v != std::floor(v) || v > 9.0e15)
        throw ConfigError("expected a non-negative integer for " + f.flag);
      return static_cast<long long>(v);
    }
    case K::text: return text;
    case K::boolean: return text != "false" && text != "0";
    case K::object: {
      json v;
      try {
        v = json::parse(text);
      } catch (const json::exception&) {
        throw ConfigError("invalid JSON for " + f.flag);
      }
      if (!v.is_object()) throw ConfigError(f.flag + " expects a JSON object");
      return v;
    }
    case K::real_list: {
      json arr = json::array();
      for (const auto& s : split(text, ',')) arr.push_back(to_real(s, f.flag));
      return arr;
    }
    case K::text_list: {
      json arr = json::array();
      for (const auto& s : split(text, ',')) {
        if (s.empty()) throw ConfigError("empty entry in " + f.flag);
        arr.push_back(s);
      }
      return arr;
    }
  }
  return nullptr;
}

std::vector<double> parse_gammas(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<double> g;
  if (parts.size() == 3) {
    const double start = to_real(parts[0], "--gammas"), ratio = to_real(parts[1], "--gammas");
    const double count = to_real(parts[2], "--gammas");
    if (!(start > 0) || !(ratio > 1) || count < 1 || count != std::floor(count))
      throw ConfigError("--gammas expects start > 0, ratio > 1 and an integer count");
    for (int i = 0; i < static_cast<int>(count); ++i) g.push_back(start * std::pow(ratio, i));
    return g;
  }
  if (parts.size() != 1) throw ConfigError("--gammas expects start:ratio:count");
  for (const auto& s : split(text, ',')) g.push_back(to_real(s, "--gammas"));
  return g;
}

}  // namespace hypokit::cli
