#include "ktk/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "ktk/errors.hpp"

namespace ktk {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t row, std::size_t col,
                             const std::string& what) {
  fail(errc::parse_error,
       path.string() + ": row " + std::to_string(row) + ", column " + std::to_string(col) + ": " +
           what);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path.string());

  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      if (rows.empty() && !table.had_header) continue;  // leading blank lines
      // A blank line inside the data would silently shift row indices.
      if (in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
      fail(errc::parse_error, path.string() + ": row " + std::to_string(line_no) + " is blank");
    }
    const std::vector<std::string> cells = split_line(line);
    std::vector<double> parsed(cells.size());
    bool numeric = true;
    std::size_t first_bad = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], parsed[c])) {
        numeric = false;
        first_bad = c;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && !table.had_header) {
        table.had_header = true;
        table.header = cells;
        width = cells.size();
        continue;
      }
      parse_fail(path, line_no, first_bad + 1,
                 "'" + cells[first_bad] + "' is not a number");
    }
    for (std::size_t c = 0; c < parsed.size(); ++c)
      if (!std::isfinite(parsed[c]))
        parse_fail(path, line_no, c + 1, "non-finite value '" + cells[c] + "'");
    if (width == 0) width = parsed.size();
    if (parsed.size() != width)
      fail(errc::parse_error, path.string() + ": row " + std::to_string(line_no) + " has " +
                                  std::to_string(parsed.size()) + " fields, expected " +
                                  std::to_string(width));
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) fail(errc::parse_error, path.string() + ": no data rows");

  table.values = Matrix(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) table.values(i, j) = rows[i][j];
  return table;
}

std::string format_value(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void write_csv(std::ostream& out, const Matrix& values) {
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_value(values(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Matrix& values) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open " + path.string() + " for writing");
  write_csv(out, values);
  if (!out) fail(errc::io_error, "failed writing " + path.string());
}

}  // namespace ktk
