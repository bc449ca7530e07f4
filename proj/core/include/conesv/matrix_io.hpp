#pragma once

#include <iosfwd>
#include <string>

#include "conesv/numerics.hpp"

namespace conesv {

// Text format: a "rows cols" header line, then one whitespace-separated row
// per line. Blank lines and anything after '#' are ignored. Errors are
// ParseError with the 1-based line number.
Matrix read_matrix(std::istream& is);
Matrix read_matrix_file(const std::string& path);

// Writes the same format with 17 significant digits (round-trips exactly).
void write_matrix(std::ostream& os, const Matrix& M);
void write_matrix_file(const std::string& path, const Matrix& M);

}  // namespace conesv
