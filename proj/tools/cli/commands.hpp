// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include <hypokit/hypokit.h>

#include "cli/config.hpp"

namespace hypokit::cli {

/// A library call failed.
class ApiError : public std::runtime_error {
 public:
  ApiError(hk_status status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
  hk_status status() const noexcept { return status_; }

 private:
  hk_status status_;
};

struct CommandOutput {
  json results = json::object();
  json diagnostics = json::object();
  bool csv_on_stdout = false;
};

/// Runs one subcommand on a validated configuration. Values the command
/// derives (default potential parameters, initial states, K, ...) are written
/// back into cfg so that the logged configuration reproduces the run.
CommandOutput run_command(const std::string& command, json& cfg);

}  // namespace hypokit::cli
