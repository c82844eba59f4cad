// SPDX-License-Identifier: Apache-2.0
#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "cli/io.hpp"

namespace hypokit::cli {

namespace {

void check(hk_status s) {
  if (s != HK_OK) throw ApiError(s, std::string(hk_status_string(s)) + ": " + hk_last_error());
}

struct PotentialDeleter {
  void operator()(hk_potential* p) const noexcept { hk_potential_destroy(p); }
};
struct AssemblyDeleter {
  void operator()(hk_assembly* p) const noexcept { hk_assembly_destroy(p); }
};
struct TableDeleter {
  void operator()(hk_table* p) const noexcept { hk_table_destroy(p); }
};
using PotentialPtr = std::unique_ptr<hk_potential, PotentialDeleter>;
using AssemblyPtr = std::unique_ptr<hk_assembly, AssemblyDeleter>;
using TablePtr = std::unique_ptr<hk_table, TableDeleter>;

json& at(json& cfg, const char* key) { return cfg[json::json_pointer(field(key).pointer)]; }

template <class T>
T get(json& cfg, const char* key) {
  return at(cfg, key).get<T>();
}

std::size_t get_size(json& cfg, const char* key) {
  return static_cast<std::size_t>(at(cfg, key).get<long long>());
}

struct PotentialInfo {
  PotentialPtr pot;
  bool torus = false;
  std::size_t dim = 0;
  double length = 0.0;
};

PotentialInfo make_potential(json& cfg, bool spectral, json& diag) {
  const std::string name = get<std::string>(cfg, "potential");
  json& params = at(cfg, "params");
  if (name == "quadratic" && !params.contains("omega")) params["omega"] = 1.0;
  if (name == "cosine" && !params.contains("h")) params["h"] = 1.0;
  if (name == "double_well") {
    if (!params.contains("a")) params["a"] = 1.0;
    if (!params.contains("b")) params["b"] = 1.0;
  }
  PotentialInfo info;
  hk_potential* raw = nullptr;
  check(hk_potential_create(name.c_str(), params.dump().c_str(), &raw));
  info.pot.reset(raw);
  int torus = 0;
  check(hk_potential_info(raw, &torus, &info.dim, &info.length));
  info.torus = torus != 0;
  if (spectral && !info.torus) {
    const double box = get<double>(cfg, "box");
    hk_potential* wrapped = nullptr;
    check(hk_potential_periodize(raw, box, &wrapped));
    info.pot.reset(wrapped);
    info.torus = true;
    info.length = box;
    diag["periodized_on_box"] = box;
  }
  return info;
}

hk_ensemble ensemble(json& cfg) {
  hk_ensemble e{1.0, 1.0, 1.0};
  const auto& keys = command_fields(cfg.at("command").get<std::string>());
  auto has = [&](const char* k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  if (has("beta")) e.beta = get<double>(cfg, "beta");
  if (has("mass")) e.mass = get<double>(cfg, "mass");
  if (has("gamma")) e.gamma = get<double>(cfg, "gamma");
  return e;
}

AssemblyPtr make_assembly(const hk_potential* pot, const hk_ensemble& e, std::size_t Kq,
                          std::size_t Np, std::size_t n_quad) {
  hk_assembly* raw = nullptr;
  check(hk_assembly_create(pot, &e, Kq, Np, n_quad, &raw));
  return AssemblyPtr(raw);
}

json complex_pair(const double z[2]) { return json::array({z[0], z[1]}); }

json matrix2(const double p[4]) {
  return json::array({json::array({p[0], p[1]}), json::array({p[2], p[3]})});
}

json report_json(const hk_variance_report& r) {
  return {{"mean", r.mean},
          {"sigma2", r.sigma2},
          {"ess", r.ess},
          {"method", r.method == HK_ACF_IPS ? "acf_ips" : "batch_means"},
          {"window_or_batches", r.window_or_batches},
          {"n_samples", r.n_samples},
          {"constant_series", r.constant_series != 0}};
}

void write_table_csv(json& cfg, const hk_table* t, CommandOutput& out) {
  const std::string path = get<std::string>(cfg, "output_path");
  std::vector<std::string> names;
  for (std::size_t c = 0; c < hk_table_cols(t); ++c) names.emplace_back(hk_table_column_name(t, c));
  write_csv(path, names, hk_table_data(t), hk_table_rows(t));
  out.csv_on_stdout = path.empty();
}

// ---------------------------------------------------------------------------

CommandOutput cmd_sample(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, false, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  for (const char* key : {"q0", "p0"}) {
    json& v = at(cfg, key);
    if (v.is_null()) v = std::vector<double>(pi.dim, 0.0);
    if (v.size() != pi.dim)
      throw ConfigError(std::string(key) + " must have " + std::to_string(pi.dim) + " entries");
  }
  const auto q0 = get<std::vector<double>>(cfg, "q0");
  const auto p0 = get<std::vector<double>>(cfg, "p0");
  const auto names = get<std::vector<std::string>>(cfg, "observables");
  std::vector<const char*> cnames;
  for (const auto& n : names) cnames.push_back(n.c_str());
  std::vector<double> fq(pi.dim), fp(pi.dim);
  hk_table* raw = nullptr;
  check(hk_simulate(pi.pot.get(), &e, get<std::string>(cfg, "scheme").c_str(), q0.data(), p0.data(),
                    pi.dim, get_size(cfg, "n_steps"), get_size(cfg, "stride"), get<double>(cfg, "dt"),
                    cnames.data(), cnames.size(), get<std::uint64_t>(cfg, "seed"),
                    get<std::uint64_t>(cfg, "stream"), &raw, fq.data(), fp.data()));
  TablePtr t(raw);
  write_table_csv(cfg, t.get(), out);

  const std::size_t rows = hk_table_rows(t.get()), cols = hk_table_cols(t.get());
  const double spacing = get<double>(cfg, "dt") * static_cast<double>(get_size(cfg, "stride"));
  json obs = json::object();
  for (std::size_t c = 1; c < cols; ++c) {
    std::vector<double> col(rows);
    for (std::size_t r = 0; r < rows; ++r) col[r] = hk_table_data(t.get())[r * cols + c];
    json entry;
    double mean = 0.0;
    check(hk_ergodic_average(col.data(), col.size(), &mean));
    entry["mean"] = mean;
    hk_variance_report rep{};
    if (hk_variance_acf(col.data(), col.size(), spacing, &rep) == HK_OK) {
      entry["sigma2"] = rep.sigma2;
      entry["ess"] = rep.ess;
    }
    obs[hk_table_column_name(t.get(), c)] = entry;
  }
  out.results = {{"rows", rows}, {"final_q", fq}, {"final_p", fp}, {"observables", obs}};
  return out;
}

CommandOutput cmd_variance(json& cfg) {
  CommandOutput out;
  const std::string input = get<std::string>(cfg, "input");
  if (input.empty()) throw ConfigError("variance needs --input");
  const Table t = read_csv(input);
  json& spacing_v = at(cfg, "spacing");
  if (spacing_v.is_null()) {
    const long tc = t.find("time");
    if (tc < 0 || t.rows() < 2) throw ConfigError("no time column; pass --spacing");
    const auto times = t.column(static_cast<std::size_t>(tc));
    spacing_v = times[1] - times[0];
  }
  const double spacing = spacing_v.get<double>();
  std::vector<std::string> cols;
  const std::string column = get<std::string>(cfg, "column");
  if (!column.empty()) {
    if (t.find(column) < 0) throw ConfigError("column '" + column + "' not found");
    cols.push_back(column);
  } else {
    for (const auto& n : t.names)
      if (n != "time") cols.push_back(n);
  }
  const std::size_t batches = get_size(cfg, "batches");
  json res = json::object();
  for (const auto& name : cols) {
    const auto x = t.column(static_cast<std::size_t>(t.find(name)));
    hk_variance_report acf{};
    check(hk_variance_acf(x.data(), x.size(), spacing, &acf));
    json entry = report_json(acf);
    double se = 0.0;
    if (hk_sigma2_stderr(x.data(), x.size(), spacing, 16, &se) == HK_OK)
      entry["sigma2_stderr"] = se;
    else
      out.diagnostics[name + "_stderr"] = hk_last_error();
    hk_variance_report bm{};
    if (hk_variance_batch_means(x.data(), x.size(), spacing, batches, &bm) == HK_OK)
      entry["batch_means"] = report_json(bm);
    else
      out.diagnostics[name + "_batch_means"] = hk_last_error();
    if (acf.constant_series) out.diagnostics[name + "_warning"] = "constant series";
    res[name] = entry;
  }
  out.results = {{"spacing", spacing}, {"columns", res}};
  return out;
}

CommandOutput cmd_spectrum(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, true, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  const std::size_t Kq = get_size(cfg, "Kq"), Np = get_size(cfg, "Np"), nq = get_size(cfg, "n_quad");
  const bool adjoint = get<bool>(cfg, "adjoint");
  const std::string path = get<std::string>(cfg, "output_path");
  auto a = make_assembly(pi.pot.get(), e, Kq, Np, nq);
  double gap = 0.0;
  std::size_t count = 0;
  hk_table* eig_raw = nullptr;
  check(hk_spectral_gap(a.get(), adjoint ? 1 : 0, &gap, &count, path.empty() ? nullptr : &eig_raw));
  TablePtr eigs(eig_raw);
  if (eigs) {
    write_csv(path, {"re", "im"}, hk_table_data(eigs.get()), hk_table_rows(eigs.get()));
  }
  a.reset();

  const bool refine = get<bool>(cfg, "refine");
  const std::size_t Kq2 = refine ? (3 * Kq + 1) / 2 : std::max<std::size_t>(1, (2 * Kq + 2) / 3);
  const std::size_t Np2 = refine ? (3 * Np + 1) / 2 : std::max<std::size_t>(3, (2 * Np + 2) / 3);
  const std::size_t nq2 = std::max(nq, 8 * Kq2);
  auto b = make_assembly(pi.pot.get(), e, Kq2, Np2, nq2);
  double gap2 = 0.0;
  check(hk_spectral_gap(b.get(), adjoint ? 1 : 0, &gap2, nullptr, nullptr));
  const double rel = std::abs(gap - gap2) / std::abs(gap);
  out.results = {{"gamma", e.gamma}, {"gap", gap},   {"Kq", Kq}, {"Np", Np},
                 {"converged", rel < 0.01}, {"eig_count_checked", count}};
  out.diagnostics["check_basis"] = {{"Kq", Kq2}, {"Np", Np2}, {"n_quad", nq2}, {"gap", gap2},
                                    {"relative_change", rel}};
  return out;
}

CommandOutput cmd_poisson(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, true, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  const std::string obs = get<std::string>(cfg, "observable");
  double sigma2 = 0.0;
  if (get<bool>(cfg, "overdamped")) {
    check(hk_overdamped_poisson(pi.pot.get(), &e, get_size(cfg, "Kq"), get_size(cfg, "n_quad"),
                                obs.c_str(), &sigma2));
  } else {
    auto a = make_assembly(pi.pot.get(), e, get_size(cfg, "Kq"), get_size(cfg, "Np"),
                           get_size(cfg, "n_quad"));
    check(hk_solve_poisson(a.get(), obs.c_str(), &sigma2));
  }
  out.results = {{"observable", obs},
                 {"generator", get<bool>(cfg, "overdamped") ? "overdamped" : "langevin"},
                 {"sigma2", sigma2}};
  return out;
}

CommandOutput cmd_poincare(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, true, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  const auto times = get<std::vector<double>>(cfg, "times");
  std::vector<double> norms(times.size()), bounds(times.size());
  double R = 0.0, ratio = 0.0;
  int holds = 0;
  check(hk_semigroup_decay(pi.pot.get(), &e, get_size(cfg, "Kq"), get_size(cfg, "n_quad"),
                           times.data(), times.size(), norms.data(), bounds.data(), &R, &ratio,
                           &holds));
  json decay = json::array();
  for (std::size_t i = 0; i < times.size(); ++i)
    decay.push_back({{"t", times[i]}, {"norm", norms[i]}, {"bound", bounds[i]}});
  out.results = {{"R_nu", R}, {"decay", decay}, {"max_ratio", ratio}, {"holds", holds != 0}};
  return out;
}

CommandOutput cmd_ode(json& cfg) {
  CommandOutput out;
  const double gamma = get<double>(cfg, "gamma");
  const auto x0 = get<std::vector<double>>(cfg, "x0");
  if (x0.size() != 2) throw ConfigError("--x0 needs two values");
  hk_table* raw = nullptr;
  check(hk_ode_trajectory(gamma, x0.data(), get<double>(cfg, "T"), get<double>(cfg, "dt"), &raw));
  TablePtr t(raw);
  write_table_csv(cfg, t.get(), out);

  double lp[2], lm[2], gap;
  check(hk_ode_eigs(gamma, lp, lm, &gap));
  out.results["eigs"] = {{"lambda_plus", complex_pair(lp)}, {"lambda_minus", complex_pair(lm)},
                         {"gap", gap}};
  double P[4], lambda, min_eig;
  int cert;
  json& eps_v = at(cfg, "epsilon");
  if (eps_v.is_null()) eps_v = 0.5;
  const double eps = eps_v.get<double>();
  const hk_status s = hk_ode_optimal_P(gamma, P, &lambda, &min_eig, &cert);
  if (s == HK_OK) {
    out.results["optimal_P"] = {{"P", matrix2(P)}, {"lambda", lambda}, {"min_eig", min_eig},
                                {"cert", cert != 0}};
  } else if (s == HK_DEFECTIVE_CASE) {
    out.diagnostics["optimal_P"] = hk_last_error();
  } else {
    check(s);
  }
  double Pp[4], mp;
  check(hk_ode_perturbative_P(gamma, eps, Pp, &mp));
  out.results["perturbative_P"] = {{"epsilon", eps}, {"P", matrix2(Pp)},
                                   {"min_eig_of_dissipation", mp}};
  double rate = 0.0;
  if (hk_ode_envelope_decay(t.get(), &rate) == HK_OK)
    out.results["envelope_decay"] = rate;
  else
    out.diagnostics["envelope_decay"] = hk_last_error();
  out.results["rows"] = hk_table_rows(t.get());
  return out;
}

CommandOutput cmd_dissipation(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, true, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  auto a = make_assembly(pi.pot.get(), e, get_size(cfg, "Kq"), get_size(cfg, "Np"),
                         get_size(cfg, "n_quad"));
  hk_dms_result r{};
  const json& eps = at(cfg, "epsilon");
  const bool tuned = eps.is_null();
  if (tuned)
    check(hk_dms_tune(a.get(), get<double>(cfg, "tol"), &r));
  else
    check(hk_dms_dissipation(a.get(), eps.get<double>(), &r));
  double gap = 0.0;
  check(hk_spectral_gap(a.get(), 0, &gap, nullptr, nullptr));
  out.results = {{"epsilon", r.epsilon},
                 {"tuned", tuned},
                 {"lambda_est", r.lambda_est},
                 {"r_norm", r.r_norm},
                 {"lham_r_norm", r.lham_r_norm},
                 {"r_norm_ok", r.r_norm_ok != 0},
                 {"lham_r_norm_ok", r.lham_r_norm_ok != 0},
                 {"gap", gap},
                 {"within_norm_equivalence", r.lambda_est <= (1.0 + std::abs(r.epsilon)) * gap}};
  return out;
}

CommandOutput cmd_bounds(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, true, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  const std::size_t Kq = get_size(cfg, "Kq"), nq = get_size(cfg, "n_quad");
  const std::string cname = get<std::string>(cfg, "case");
  hk_schur_case kind;
  if (cname == "convex")
    kind = HK_SCHUR_CONVEX;
  else if (cname == "hessian")
    kind = HK_SCHUR_HESSIAN_LOWER_BOUND;
  else if (cname == "general")
    kind = HK_SCHUR_GENERAL;
  else
    throw ConfigError("--case must be convex, hessian or general");
  json& kv = at(cfg, "K");
  if (kind == HK_SCHUR_HESSIAN_LOWER_BOUND && kv.is_null()) {
    if (pi.dim != 1) throw ConfigError("automatic K needs a one-dimensional potential");
    const std::size_t n = std::max<std::size_t>(4096, nq);
    double lo = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = pi.length * static_cast<double>(i) / static_cast<double>(n);
      double h;
      check(hk_potential_hess(pi.pot.get(), &q, 1, &h));
      lo = std::min(lo, h);
    }
    kv = std::max(0.0, -lo);
  }
  const double K = kv.is_null() ? 0.0 : kv.get<double>();

  auto a = make_assembly(pi.pot.get(), e, Kq, get_size(cfg, "Np"), nq);
  double R = 0.0;
  check(hk_poincare_constant(pi.pot.get(), &e, Kq, nq, &R));
  double numeric = 0.0, bound = 0.0;
  int holds = 0, unpinned = 0;
  check(hk_verify_schur_bound(a.get(), pi.pot.get(), &e, kind, K, get<double>(cfg, "c_prime"), R,
                              get<double>(cfg, "slack"), &numeric, &bound, &holds));
  check(hk_schur_bound(&e, R, kind, K, get<double>(cfg, "c_prime"), &bound, &unpinned));
  double gap = 0.0;
  check(hk_spectral_gap(a.get(), 0, &gap, nullptr, nullptr));
  out.results = {{"R_nu", R},          {"resolvent_norm", numeric}, {"bound", bound},
                 {"holds", holds != 0}, {"case", cname},             {"K", K},
                 {"unpinned", unpinned != 0}, {"inverse_gap", 1.0 / gap}};
  double wo = 0.0, wu = 0.0;
  if (hk_resolvent_witnesses(pi.pot.get(), &e, a.get(), &wo, &wu) == HK_OK)
    out.results["witnesses"] = {{"overdamped", wo}, {"underdamped", wu}};
  else
    out.diagnostics["witnesses"] = hk_last_error();
  double c1 = 0.0, c3 = 0.0;
  int feasible = 0;
  check(hk_condition_constants(pi.pot.get(), &e, get<double>(cfg, "c2"),
                               get_size(cfg, "grid_points"), -pi.length / 2, pi.length / 2, &c1,
                               &c3, &feasible));
  out.results["condition_constants"] = {{"c1", c1}, {"c3", c3}, {"feasible", feasible != 0}};
  return out;
}

CommandOutput cmd_scan(json& cfg) {
  CommandOutput out;
  PotentialInfo pi = make_potential(cfg, true, out.diagnostics);
  const hk_ensemble e = ensemble(cfg);
  const auto gammas = parse_gammas(get<std::string>(cfg, "gammas"));
  hk_table* raw = nullptr;
  hk_scan_fit fit{};
  check(hk_gamma_scan(pi.pot.get(), &e, gammas.data(), gammas.size(), get_size(cfg, "Kq"),
                      get_size(cfg, "Np"), get_size(cfg, "n_quad"), &raw, &fit));
  TablePtr t(raw);
  write_table_csv(cfg, t.get(), out);
  json rows = json::array();
  const double* d = hk_table_data(t.get());
  for (std::size_t r = 0; r < hk_table_rows(t.get()); ++r)
    rows.push_back({{"gamma", d[4 * r]}, {"gap", d[4 * r + 1]}, {"lower_model", d[4 * r + 2]},
                    {"ok", d[4 * r + 3] != 0.0}});
  out.results = {{"rows", rows},
                 {"fit",
                  {{"slope_left", fit.slope_left},
                   {"slope_right", fit.slope_right},
                   {"lambda_bar", fit.lambda_bar},
                   {"n_left", fit.n_left},
                   {"n_right", fit.n_right},
                   {"complete", fit.complete != 0}}}};
  return out;
}

}  // namespace

CommandOutput run_command(const std::string& command, json& cfg) {
  if (command == "sample") return cmd_sample(cfg);
  if (command == "variance") return cmd_variance(cfg);
  if (command == "spectrum") return cmd_spectrum(cfg);
  if (command == "poisson") return cmd_poisson(cfg);
  if (command == "poincare") return cmd_poincare(cfg);
  if (command == "ode") return cmd_ode(cfg);
  if (command == "dissipation") return cmd_dissipation(cfg);
  if (command == "bounds") return cmd_bounds(cfg);
  if (command == "scan") return cmd_scan(cfg);
  throw ConfigError("unknown subcommand '" + command + "'");
}

}  // namespace hypokit::cli
