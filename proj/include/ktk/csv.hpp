#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ktk/matrix.hpp"

namespace ktk {

// A parsed CSV table. values(i, j) is row i, column j of the file, in file
// order; callers decide whether rows are samples or matrix rows.
struct CsvTable {
  Matrix values;
  bool had_header = false;
  std::vector<std::string> header;  // empty when had_header is false
};

// Reads a rectangular numeric CSV. A first line containing any cell that
// does not parse as a number is taken to be a header. Later non-numeric
// cells, ragged rows, non-finite values, or an empty file raise ParseError
// naming file, row, and column (1-based, counting the header).
CsvTable read_csv(const std::filesystem::path& path);

// CSV with one row per line, comma separated, every value %.17g.
void write_csv(std::ostream& out, const Matrix& values);
void write_csv(const std::filesystem::path& path, const Matrix& values);

std::string format_value(double v);  // the %.17g used everywhere

}  // namespace ktk
