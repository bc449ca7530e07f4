#include "conesv/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace conesv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(line, "not a number: '" + s + "'");
  return v;
}

long long to_int(const std::string& s, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, "not an integer: '" + s + "'");
  return v;
}

}  // namespace

Matrix read_matrix(std::istream& is) {
  std::string raw;
  int lineno = 0;
  long long rows = -1, cols = -1;
  Matrix M;
  long long filled = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    const std::vector<std::string> f = split_fields(raw);
    if (f.empty()) continue;
    if (rows < 0) {
      if (f.size() != 2) throw ParseError(lineno, "header must be 'rows cols'");
      rows = to_int(f[0], lineno);
      cols = to_int(f[1], lineno);
      if (rows < 1 || cols < 1) throw ParseError(lineno, "dimensions must be positive");
      M.resize(rows, cols);
      continue;
    }
    if (filled == rows) throw ParseError(lineno, "more than " + std::to_string(rows) + " rows");
    if (static_cast<long long>(f.size()) != cols)
      throw ParseError(lineno, "expected " + std::to_string(cols) + " entries, found " +
                                   std::to_string(f.size()));
    for (long long j = 0; j < cols; ++j) {
      const double v = to_double(f[j], lineno);
      if (!std::isfinite(v)) throw ParseError(lineno, "non-finite entry");
      M(filled, j) = v;
    }
    ++filled;
  }
  if (rows < 0) throw ParseError(lineno, "missing 'rows cols' header");
  if (filled != rows)
    throw ParseError(lineno, "expected " + std::to_string(rows) + " rows, found " +
                                 std::to_string(filled));
  return M;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& os, const Matrix& M) {
  os << M.rows() << ' ' << M.cols() << '\n' << std::setprecision(17);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) os << (j ? " " : "") << M(i, j);
    os << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  write_matrix(out, M);
}

}  // namespace conesv
