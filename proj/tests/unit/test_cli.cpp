// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>

#include "cli/config.hpp"
#include "cli/run.hpp"

namespace fs = std::filesystem;
using hypokit::cli::ConfigError;
using hypokit::cli::json;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hypokit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return hypokit::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hypokit_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST(CliConfig, DefaultsValidateForEveryCommand) {
  for (const auto& cmd : hypokit::cli::subcommands()) {
    json cfg = hypokit::cli::default_config(cmd);
    cfg["command"] = cmd;
    EXPECT_NO_THROW(hypokit::cli::validate_config(cmd, cfg)) << cmd;
  }
}

TEST(CliConfig, RejectsUnknownInapplicableAndMistyped) {
  using hypokit::cli::validate_config;
  EXPECT_THROW(validate_config("spectrum", json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(validate_config("spectrum", json{{"ensemble", {{"betta", 1.0}}}}), ConfigError);
  EXPECT_THROW(validate_config("spectrum", json{{"options", {{"figure1", true}}}}), ConfigError);
  EXPECT_THROW(validate_config("spectrum", json{{"ensemble", {{"beta", "hot"}}}}), ConfigError);
  EXPECT_THROW(validate_config("sample", json{{"discretization", {{"n_steps", 1.5}}}}), ConfigError);
  EXPECT_NO_THROW(validate_config("spectrum", json::object()));
  EXPECT_NO_THROW(validate_config("dissipation", json{{"options", {{"epsilon", nullptr}}}}));
}

TEST(CliConfig, SchemaListsEveryField) {
  std::ifstream in(std::string(HYPOKIT_SOURCE_DIR) + "/docs/config.schema.json");
  ASSERT_TRUE(in.good());
  const json schema = json::parse(in);
  std::size_t leaves = 0;
  for (const auto& f : hypokit::cli::all_fields()) {
    json node = schema;
    std::stringstream ss(f.pointer.substr(1));
    std::string part;
    bool found = true;
    while (std::getline(ss, part, '/')) {
      if (!node.contains("properties") || !node["properties"].contains(part)) {
        found = false;
        break;
      }
      node = node["properties"][part];
    }
    EXPECT_TRUE(found) << f.pointer;
    if (found) ++leaves;
  }
  EXPECT_EQ(leaves, hypokit::cli::all_fields().size());
  EXPECT_EQ(schema["additionalProperties"], false);
}

TEST(CliConfig, GammaLists) {
  const auto g = hypokit::cli::parse_gammas("0.125:2:7");
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g.front(), 0.125);
  EXPECT_EQ(g.back(), 8.0);
  EXPECT_EQ(hypokit::cli::parse_gammas("1,2,3"), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_THROW(hypokit::cli::parse_gammas("1:2"), ConfigError);
}

TEST_F(CliRun, ExitCodes) {
  EXPECT_EQ(run_cli({"frobnicate"}), 1);
  EXPECT_EQ(run_cli({"spectrum", "--beta", "-1", "--Kq", "4", "--Np", "4", "--n-quad", "64"}), 1);
  EXPECT_EQ(run_cli({"ode", "--figure1", "--gamma", "1"}), 1);
  EXPECT_EQ(run_cli({"spectrum", "--beta", "10000", "--Kq", "16", "--Np", "4", "--report",
                     path("ill.json")}),
            2);
  std::ofstream(path("bad.json")) << R"({"ensemble": {"gama": 1}})";
  EXPECT_EQ(run_cli({"spectrum", "--config", path("bad.json")}), 1);
}

TEST_F(CliRun, ConfigFileAndFlagsCombine) {
  std::ofstream(path("cfg.json")) << R"({"ensemble": {"gamma": 0.5}, "options": {"T": 5}})";
  ASSERT_EQ(run_cli({"ode", "--config", path("cfg.json"), "--dt", "0.01", "--out", path("o.csv"),
                     "--report", path("o.json")}),
            0);
  const json rep = json::parse(slurp(path("o.json")));
  EXPECT_EQ(rep["config"]["ensemble"]["gamma"], 0.5);
  EXPECT_EQ(rep["config"]["options"]["T"], 5.0);
  EXPECT_EQ(rep["config"]["discretization"]["dt"], 0.01);
}

TEST_F(CliRun, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> cmds = {
      {"ode", "--figure1"},
      {"sample", "--n-steps", "2000", "--stride", "5", "--seed", "9", "--observables", "q,p,H"},
      {"poincare", "--Kq", "8", "--n-quad", "128"},
  };
  for (const auto& cmd : cmds) {
    std::string out[2], rep[2];
    // same paths both times: the report embeds them in the resolved config
    for (int k = 0; k < 2; ++k) {
      auto args = cmd;
      const bool csv = cmd[0] != "poincare";
      if (csv) args.insert(args.end(), {"--out", path("run.csv")});
      args.insert(args.end(), {"--report", path("run.json")});
      ASSERT_EQ(run_cli(args), 0) << cmd[0];
      if (csv) out[k] = slurp(path("run.csv"));
      rep[k] = slurp(path("run.json"));
      fs::remove(path("run.csv"));
      fs::remove(path("run.json"));
    }
    EXPECT_EQ(out[0], out[1]) << cmd[0];
    EXPECT_EQ(rep[0], rep[1]) << cmd[0];
    EXPECT_FALSE(rep[0].empty());
  }
}
