// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/errors.hpp"

namespace tracelens {

// A rectangular table of pre-formatted cells plus the per-column fixed
// decimal rule used when rows are built from numbers (-1 = not numeric).
struct TableDoc {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> col_decimals;

  static std::string format_number(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals < 0 ? 6 : decimals, v);
    std::string s(buf);
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
      bool all_zero = true;
      for (char c : s) {
        if (c != '-' && c != '0' && c != '.') all_zero = false;
      }
      if (all_zero) s.erase(0, 1);
    }
    return s;
  }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != headers.size()) {
      throw Error(Errc::ragged_rows,
                  "row of " + std::to_string(cells.size()) + " cells under " +
                      std::to_string(headers.size()) + " headers");
    }
    rows.push_back(std::move(cells));
  }

  // Numeric cells formatted per the column rule; nullopt renders empty.
  void add_mixed_row(const std::vector<std::string>& text_cells,
                     const std::vector<std::optional<double>>& numeric_tail) {
    std::vector<std::string> cells = text_cells;
    for (std::size_t i = 0; i < numeric_tail.size(); ++i) {
      std::size_t col = text_cells.size() + i;
      int decimals = col < col_decimals.size() ? col_decimals[col] : 6;
      cells.push_back(numeric_tail[i].has_value()
                          ? format_number(*numeric_tail[i], decimals)
                          : std::string());
    }
    add_row(std::move(cells));
  }
};

enum class TableFormat { csv, markdown };

inline std::optional<TableFormat> parse_table_format(std::string_view s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "md" || s == "markdown") return TableFormat::markdown;
  return std::nullopt;
}

constexpr const char* table_extension(TableFormat f) {
  return f == TableFormat::csv ? "csv" : "md";
}

namespace detail {

inline std::string csv_cell(const std::string& cell) {
  bool needs_quotes = cell.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string md_cell(const std::string& cell) {
  std::string out;
  for (char c : cell) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

}  // namespace detail

inline std::string emit_table(const TableDoc& doc, TableFormat format) {
  for (const auto& row : doc.rows) {
    if (row.size() != doc.headers.size()) {
      throw Error(Errc::ragged_rows, "table has rows of unequal arity");
    }
  }

  std::string out;
  if (format == TableFormat::csv) {
    for (std::size_t i = 0; i < doc.headers.size(); ++i) {
      if (i > 0) out += ',';
      out += detail::csv_cell(doc.headers[i]);
    }
    out += '\n';
    for (const auto& row : doc.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out += ',';
        out += detail::csv_cell(row[i]);
      }
      out += '\n';
    }
    return out;
  }

  out += '|';
  for (const auto& h : doc.headers) out += ' ' + detail::md_cell(h) + " |";
  out += "\n|";
  for (std::size_t i = 0; i < doc.headers.size(); ++i) out += " --- |";
  out += '\n';
  for (const auto& row : doc.rows) {
    out += '|';
    for (const auto& cell : row) out += ' ' + detail::md_cell(cell) + " |";
    out += '\n';
  }
  return out;
}

}  // namespace tracelens
