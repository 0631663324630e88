#include "polysart/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "polysart/error.hpp"

namespace polysart::csv {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Parse,
              std::string(source) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Table read(std::istream& in, std::string_view source, std::string_view expected_header) {
  Table table;
  std::string raw;
  std::size_t line_no = 0;
  bool header_pending = !expected_header.empty();
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (header_pending) {
      if (line != expected_header) {
        fail(source, line_no, "expected header '" + std::string(expected_header) + "', found '" +
                                  std::string(line) + "'");
      }
      for (auto c : cells) table.header.emplace_back(c);
      table.columns = cells.size();
      header_pending = false;
      continue;
    }
    if (table.columns == 0) table.columns = cells.size();
    if (cells.size() != table.columns) {
      fail(source, line_no,
           "expected " + std::to_string(table.columns) + " columns, found " + std::to_string(cells.size()));
    }
    for (auto cell : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
        fail(source, line_no, "not a number: '" + std::string(cell) + "'");
      }
      table.values.push_back(v);
    }
    table.line_numbers.push_back(line_no);
  }
  if (header_pending) fail(source, line_no, "missing header '" + std::string(expected_header) + "'");
  return table;
}

Table read_file(const std::string& path, std::string_view expected_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return read(in, path, expected_header);
}

std::string format(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, ec == std::errc{} ? ptr : buffer);
}

void write_row(std::ostream& out, const double* values, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    if (k != 0) out << ',';
    out << format(values[k]);
  }
  out << '\n';
}

}  // namespace polysart::csv
