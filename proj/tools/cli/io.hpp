// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

namespace hypokit::cli {

/// %.17g, the format every CSV number goes through.
std::string format_double(double v);

struct Table {
  std::vector<std::string> names;
  std::vector<double> data;  // row-major
  std::size_t rows() const { return names.empty() ? 0 : data.size() / names.size(); }
  std::vector<double> column(std::size_t c) const;
  /// Index of a named column or -1.
  long find(const std::string& name) const;
};

/// Writes a header line and rows; LF line endings. An empty path means stdout.
void write_csv(const std::string& path, const std::vector<std::string>& names,
               const double* data, std::size_t rows);

Table read_csv(const std::string& path);

/// Pretty-printed JSON with a trailing newline. Empty path means `fallback`.
void write_json(const std::string& path, const nlohmann::json& j, std::FILE* fallback);

}  // namespace hypokit::cli
