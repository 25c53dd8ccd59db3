//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_CSV_HPP_
#define CHEMSCREEN_CSV_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chemscreen::csv {

// Minimal CSV: comma-separated, first line is the header, no quoting or
// embedded commas (none of the toolkit's fields can contain one), CRLF
// tolerated on read, LF written.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column, or -1.
  int column(std::string_view name) const;
};

Table read_file(const std::string &path);
Table read_string(std::string_view text);

std::string to_string(const Table &table);
void write_file(const std::string &path, const Table &table);

// Shortest decimal form that re-parses to the same double (std::to_chars).
std::string format_double(double value);

std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

}  // namespace chemscreen::csv

#endif  // CHEMSCREEN_CSV_HPP_
