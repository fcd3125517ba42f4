// Copyright 2026 The losstree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOSSTREE_REPORT_HPP
#define LOSSTREE_REPORT_HPP

// Row tables and their CSV / JSON renderings.
//
// CSV: header row, comma separated, doubles in the shortest of %.15g to %.17g
// that round-trips, list cells joined with ',' and quoted. JSON: one top-level array
// of row objects, keys in column order.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "losstree/error.hpp"

namespace losstree {

using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string, std::vector<int>,
                          std::vector<double>>;

struct Row {
  std::vector<std::pair<std::string, Cell>> cells;

  Row& set(std::string key, Cell value) {
    cells.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

using Table = std::vector<Row>;

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidInput("unknown output format '" + s + "'");
}

namespace detail {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  // Shortest of %.15g .. %.17g that round-trips.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_same_v<T, double>) {
      s += format_double(xs[i]);
    } else {
      s += std::to_string(xs[i]);
    }
  }
  return s;
}

inline std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return csv_quote(v);
        } else if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<double>>) {
          return csv_quote(join(v));
        } else {
          return std::to_string(v);
        }
      },
      c);
}

inline nlohmann::ordered_json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

}  // namespace detail

inline std::string to_csv(const Table& table) {
  std::string out;
  if (table.empty()) return out;
  for (std::size_t i = 0; i < table.front().cells.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_quote(table.front().cells[i].first);
  }
  out += '\n';
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_cell(row.cells[i].second);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const Table& table) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : table) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [k, v] : row.cells) obj[k] = detail::json_cell(v);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

inline std::string render(const Table& table, OutputFormat fmt) {
  return fmt == OutputFormat::csv ? to_csv(table) : to_json(table);
}

/// Writes `contents` to a sibling temp file, then renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << contents;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace losstree

#endif  // LOSSTREE_REPORT_HPP
