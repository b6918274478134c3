#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace matchfn::csv {

/// One delimiter-separated table with a header row. Blank lines and lines
/// starting with '#' are skipped but still counted for row numbers.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;  // 1-based, header is row 1

  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws ValidationError naming the missing column.
  std::size_t require_column(std::string_view name) const;
};

std::vector<std::string> split(std::string_view line, char delimiter);
Table read(std::istream& in, char delimiter = ',');

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace matchfn::csv
