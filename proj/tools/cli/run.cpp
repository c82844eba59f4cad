// SPDX-License-Identifier: Apache-2.0
#include "cli/run.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <hypokit/hypokit.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/io.hpp"

namespace hypokit::cli {

namespace {

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"sample", "run a Langevin, overdamped or Hamiltonian trajectory"},
      {"variance", "asymptotic variance of trajectory columns"},
      {"spectrum", "spectral gap of the Galerkin generator"},
      {"poisson", "asymptotic variance from the Poisson equation"},
      {"poincare", "Poincare constant and semigroup decay check"},
      {"ode", "two-dimensional hypocoercive toy model"},
      {"dissipation", "modified-norm dissipation rate"},
      {"bounds", "resolvent norm, explicit bound and witnesses"},
      {"scan", "spectral gap over a range of frictions"},
  };
  return d;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

int exit_code(hk_status s) {
  switch (s) {
    case HK_NUMERICAL_FAILURE:
    case HK_ILL_CONDITIONED_BASIS:
    case HK_INTERNAL_ERROR:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"hypokit: Langevin sampling and hypocoercivity numerics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hk_version()));

  struct Bound {
    CLI::App* sub;
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, std::unique_ptr<Bound>> subs;
  for (const auto& name : subcommands()) {
    auto b = std::make_unique<Bound>();
    b->sub = app.add_subcommand(name, descriptions().at(name));
    b->sub->add_option("--config", b->config_path, "JSON configuration file");
    for (const auto& key : command_fields(name)) {
      const Field& f = field(key);
      if (f.kind == FieldKind::boolean)
        b->options[key] = b->sub->add_flag(f.flag, f.help);
      else
        b->options[key] = b->sub->add_option(f.flag, b->values[key], f.help);
    }
    subs[name] = std::move(b);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::fputs(app.help().c_str(), stdout);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::printf("%s\n", hk_version());
    return 0;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "hypokit: %s\n%s", e.what(), app.help().c_str());
    return 1;
  }

  std::string command;
  for (const auto& [name, b] : subs)
    if (b->sub->parsed()) command = name;
  Bound& b = *subs.at(command);

  json cfg;
  try {
    json user = b.config_path.empty() ? json::object() : load_config_file(b.config_path);
    validate_config(command, user);
    for (const auto& [key, opt] : b.options) {
      if (opt->count() == 0) continue;
      const Field& f = field(key);
      user[json::json_pointer(f.pointer)] =
          f.kind == FieldKind::boolean ? json(true) : parse_flag_value(f, b.values.at(key));
    }
    json base = default_config(command);
    const json::json_pointer fig("/options/figure1");
    if (command == "ode" && user.contains(fig) && user.at(fig).get<bool>()) {
      const json figure = {{"ensemble", {{"gamma", 0.5}}},
                           {"options", {{"x0", {1.0, 1.0}}, {"T", 40.0}}}};
      const json merged = merge(figure, user);
      if (merged.at("/ensemble/gamma"_json_pointer) != 0.5 ||
          merged.at("/options/x0"_json_pointer) != json({1.0, 1.0}) ||
          merged.at("/options/T"_json_pointer) != 40.0)
        throw ConfigError("--figure1 fixes gamma = 0.5, x0 = 1,1 and T = 40");
      base = merge(base, figure);
    }
    cfg = merge(base, user);
    cfg["command"] = command;
    validate_config(command, cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "hypokit: %s\n", e.what());
    return 1;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "hypokit: invalid configuration: %s\n", e.what());
    return 1;
  }

  int code = 0;
  json report;
  try {
    CommandOutput out = run_command(command, cfg);
    report = {{"config", cfg},
              {"results", out.results},
              {"diagnostics", out.diagnostics},
              {"version", hk_version()}};
    std::fprintf(stderr, "hypokit: resolved config %s\n", cfg.dump().c_str());
    const std::string rpath = cfg.value(json::json_pointer("/report_path"), std::string());
    write_json(rpath, report, out.csv_on_stdout ? stderr : stdout);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "hypokit: resolved config %s\n", cfg.dump().c_str());
    std::fprintf(stderr, "hypokit: %s\n", e.what());
    code = 1;
  } catch (const ApiError& e) {
    std::fprintf(stderr, "hypokit: resolved config %s\n", cfg.dump().c_str());
    std::fprintf(stderr, "hypokit: %s\n", e.what());
    code = exit_code(e.status());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hypokit: resolved config %s\n", cfg.dump().c_str());
    std::fprintf(stderr, "hypokit: %s\n", e.what());
    code = 1;
  }
  return code;
}

}  // namespace hypokit::cli
