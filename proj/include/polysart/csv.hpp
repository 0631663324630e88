#pragma once

// Minimal CSV helpers shared by the fixture loaders and the CLI.

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace polysart::csv {

struct Table {
  std::vector<std::string> header;  // empty when the file has no header row
  std::size_t columns = 0;
  std::vector<double> values;  // row-major
  std::vector<std::size_t> line_numbers;  // source line of each row, for diagnostics

  std::size_t rows() const { return columns == 0 ? 0 : values.size() / columns; }
  double at(std::size_t row, std::size_t col) const { return values[row * columns + col]; }
};

/// Parses comma-separated numeric rows. Blank lines and lines starting with
/// '#' are skipped. When `expected_header` is non-empty, the first data line
/// must match it exactly. Throws Error(Parse) naming `source` and the line.
Table read(std::istream& in, std::string_view source, std::string_view expected_header = {});
Table read_file(const std::string& path, std::string_view expected_header = {});

/// 17 significant digits, enough to round-trip any double.
std::string format(double value);

void write_row(std::ostream& out, const double* values, std::size_t count);

}  // namespace polysart::csv
