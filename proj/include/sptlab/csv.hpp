/*
 * Copyright 2026 The sptlab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
/**
 * @file csv.hpp
 * @brief CSV tables with shortest round-trip number formatting, LF endings
 *        and a header row.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "sptlab/error.hpp"

namespace sptlab {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

class CsvTable {
 public:
  using Cell = std::variant<std::string, double, std::int64_t>;

  CsvTable(std::string name, std::vector<std::string> header)
      : name_(std::move(name)), header_(std::move(header)) {}

  void add_row(const std::vector<Cell>& cells) {
    if (cells.size() != header_.size()) {
      throw Error(ErrorCode::DimensionMismatch, name_ + ": row has " + std::to_string(cells.size()) +
                                                    " cells, header has " + std::to_string(header_.size()));
    }
    std::vector<std::string> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(render(c));
    rows_.push_back(std::move(row));
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
  [[nodiscard]] const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  [[nodiscard]] std::string str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& r : rows_) append_line(out, r);
    return out;
  }

  /// Writes `dir / name()` in binary mode so line endings stay LF.
  std::filesystem::path write(const std::filesystem::path& dir) const {
    const auto path = dir / name_;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    const std::string text = str();
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
    return path;
  }

 private:
  static std::string render(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            return quote(v);
          } else if constexpr (std::is_same_v<T, double>) {
            return format_double(v);
          } else {
            return std::to_string(v);
          }
        },
        c);
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  }

  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }

  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace sptlab
