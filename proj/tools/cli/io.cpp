// SPDX-License-Identifier: Apache-2.0
#include "cli/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "cli/config.hpp"

namespace hypokit::cli {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f && f != stdout && f != stderr) std::fclose(f);
  }
};

using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_out(const std::string& path, std::FILE* fallback) {
  if (path.empty()) return FilePtr(fallback);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  return FilePtr(f);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> Table::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = data[r * names.size() + c];
  return out;
}

long Table::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<long>(i);
  return -1;
}

void write_csv(const std::string& path, const std::vector<std::string>& names, const double* data,
               std::size_t rows) {
  FilePtr f = open_out(path, stdout);
  for (std::size_t c = 0; c < names.size(); ++c)
    std::fprintf(f.get(), c ? ",%s" : "%s", names[c].c_str());
  std::fputc('\n', f.get());
  char buf[40];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", data[r * names.size() + c]);
      if (c) std::fputc(',', f.get());
      std::fputs(buf, f.get());
    }
    std::fputc('\n', f.get());
  }
  if (std::fflush(f.get()) != 0) throw std::runtime_error("write failed for '" + path + "'");
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) t.names.push_back(name);
  }
  if (t.names.empty()) throw ConfigError("'" + path + "' has no header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (std::size_t c = 0; c < t.names.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ConfigError("bad number on line " + std::to_string(lineno));
      t.data.push_back(v);
      p = end;
      if (c + 1 < t.names.size()) {
        if (*p != ',') throw ConfigError("too few columns on line " + std::to_string(lineno));
        ++p;
      }
    }
    if (*p != '\0') throw ConfigError("too many columns on line " + std::to_string(lineno));
  }
  return t;
}

void write_json(const std::string& path, const nlohmann::json& j, std::FILE* fallback) {
  FilePtr f = open_out(path, fallback);
  const std::string s = j.dump(2) + "\n";
  if (std::fwrite(s.data(), 1, s.size(), f.get()) != s.size() || std::fflush(f.get()) != 0)
    throw std::runtime_error("write failed for report");
}

}  // namespace hypokit::cli
