// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hypokit::cli {

using nlohmann::json;

/// Bad configuration or command line; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind { real, integer, text, boolean, real_list, text_list, object };

/// One configurable value: its JSON pointer inside RunConfig and its flag.
struct Field {
  std::string key;
  std::string pointer;
  FieldKind kind;
  std::string flag;
  std::string help;
  bool nullable = false;
};

const std::vector<std::string>& subcommands();

/// Every field known to the schema.
const std::vector<Field>& all_fields();

/// Keys of all_fields() that apply to a subcommand.
const std::vector<std::string>& command_fields(std::string_view command);

const Field& field(std::string_view key);

/// Defaults of every field applying to the command.
json default_config(std::string_view command);

/// Rejects unknown keys, keys that do not apply to the command, and values
/// of the wrong type.
void validate_config(std::string_view command, const json& cfg);

/// Recursive object merge; values in `over` win.
json merge(json base, const json& over);

/// Parses a flag value according to the field kind ("1,2" for lists).
json parse_flag_value(const Field& f, const std::string& text);

/// "start:ratio:count" or a comma list.
std::vector<double> parse_gammas(const std::string& text);

}  // namespace hypokit::cli
