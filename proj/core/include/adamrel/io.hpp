// Copyright 2026 The adamrel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adamrel::io {

/// Shortest-safe locale-independent rendering with 17 significant digits;
/// parse_double(format_double(x)) == x for every finite x.
std::string format_double(double value);

/// Strict parse of a full token ('.' separator, no surrounding junk).
/// Accepts "nan", "inf", "-inf".
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Minimal CSV table: a header row and string cells. Rows must have exactly
/// as many cells as the header and every row must end with '\n'.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::invalid_argument if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace adamrel::io
