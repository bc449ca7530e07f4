#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "conesv/bnb.hpp"

namespace conesv {

namespace {

void put_term(std::ostream& os, double coef, const std::string& var, bool& first) {
  if (coef < 0.0) {
    os << " - ";
  } else if (!first) {
    os << " + ";
  } else {
    os << ' ';
  }
  os << std::abs(coef) << ' ' << var;
  first = false;
}

std::string name(char prefix, int index) { return prefix + std::to_string(index + 1); }

// Parses "<prefix><1-based index>".
int index_of(const std::string& var, char prefix, int limit, int line) {
  if (var.size() < 2 || var[0] != prefix) throw ParseError(line, "unexpected variable '" + var + "'");
  int k = 0;
  try {
    k = std::stoi(var.substr(1));
  } catch (const std::exception&) {
    throw ParseError(line, "bad variable '" + var + "'");
  }
  if (k < 1 || k > limit) throw ParseError(line, "variable index out of range in '" + var + "'");
  return k - 1;
}

double parse_number(const std::string& s, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "bad number '" + s + "'");
  }
}

}  // namespace

void export_miqcp(const SVInstance& inst, std::ostream& os) {
  const Matrix& A = inst.A();
  const Matrix& G = inst.P().generators();
  const Matrix& H = inst.Q().generators();
  const int m = inst.m(), n = inst.n();
  const int p = static_cast<int>(G.cols()), q = static_cast<int>(H.cols());
  os << std::setprecision(17);
  os << "\\ cone singular value problem: min <u, A v>, u = G x, v = H y, x, y >= 0, |u| = |v| = 1\n";
  os << "\\ dims " << m << ' ' << n << ' ' << p << ' ' << q << '\n';
  os << "Minimize\n obj: [";
  bool first = true;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (A(i, j) != 0.0) put_term(os, 2.0 * A(i, j), name('u', i) + " * " + name('v', j), first);
  os << " ] / 2\nSubject To\n";
  for (int i = 0; i < m; ++i) {
    os << " gu" << i + 1 << ": " << name('u', i);
    for (int k = 0; k < p; ++k)
      if (G(i, k) != 0.0) {
        bool f = false;
        put_term(os, -G(i, k), name('x', k), f);
      }
    os << " = 0\n";
  }
  for (int j = 0; j < n; ++j) {
    os << " hv" << j + 1 << ": " << name('v', j);
    for (int k = 0; k < q; ++k)
      if (H(j, k) != 0.0) {
        bool f = false;
        put_term(os, -H(j, k), name('y', k), f);
      }
    os << " = 0\n";
  }
  os << " nu: [";
  for (int i = 0; i < m; ++i) os << (i ? " + " : " ") << name('u', i) << " ^ 2";
  os << " ] = 1\n nv: [";
  for (int j = 0; j < n; ++j) os << (j ? " + " : " ") << name('v', j) << " ^ 2";
  os << " ] = 1\nBounds\n";
  for (int i = 0; i < m; ++i) os << ' ' << name('u', i) << " free\n";
  for (int j = 0; j < n; ++j) os << ' ' << name('v', j) << " free\n";
  os << "End\n";
}

MiqcpModel read_miqcp(std::istream& is) {
  std::string line;
  int lineno = 0;
  int m = -1, n = -1, p = -1, q = -1;
  MiqcpModel model;
  std::string section;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "\\") {
      if (tok.size() == 6 && tok[1] == "dims") {
        m = std::stoi(tok[2]);
        n = std::stoi(tok[3]);
        p = std::stoi(tok[4]);
        q = std::stoi(tok[5]);
        if (m < 1 || n < 1 || p < 1 || q < 1) throw ParseError(lineno, "bad dimensions");
        model.A = Matrix::Zero(m, n);
        model.G = Matrix::Zero(m, p);
        model.H = Matrix::Zero(n, q);
      }
      continue;
    }
    if (tok[0] == "Minimize" || tok[0] == "Subject" || tok[0] == "Bounds" || tok[0] == "End") {
      section = tok[0];
      continue;
    }
    if (m < 0) throw ParseError(lineno, "missing dims comment before the model");
    if (section == "Minimize") {
      // obj: [ c u1 * v1 - c u1 * v2 ... ] / 2
      size_t k = 1;
      if (tok.size() < 2 || tok[0] != "obj:" || tok[1] != "[") throw ParseError(lineno, "bad objective");
      k = 2;
      while (k < tok.size() && tok[k] != "]") {
        double sign = 1.0;
        if (tok[k] == "+" || tok[k] == "-") {
          sign = tok[k] == "-" ? -1.0 : 1.0;
          ++k;
        }
        if (k + 3 >= tok.size() || tok[k + 2] != "*") throw ParseError(lineno, "bad bilinear term");
        const double c = parse_number(tok[k], lineno);
        const int i = index_of(tok[k + 1], 'u', m, lineno);
        const int j = index_of(tok[k + 3], 'v', n, lineno);
        model.A(i, j) = sign * c / 2.0;
        k += 4;
      }
    } else if (section == "Subject") {
      const std::string& label = tok[0];
      if (label.rfind("gu", 0) == 0 || label.rfind("hv", 0) == 0) {
        const bool gside = label[0] == 'g';
        if (tok.size() < 4) throw ParseError(lineno, "bad linking constraint");
        const int row = index_of(tok[1], gside ? 'u' : 'v', gside ? m : n, lineno);
        size_t k = 2;
        while (k < tok.size() && tok[k] != "=") {
          if (tok[k] != "+" && tok[k] != "-") throw ParseError(lineno, "expected sign");
          const double sign = tok[k] == "-" ? -1.0 : 1.0;
          if (k + 2 >= tok.size()) throw ParseError(lineno, "truncated term");
          const double c = parse_number(tok[k + 1], lineno);
          if (gside) {
            model.G(row, index_of(tok[k + 2], 'x', p, lineno)) = -sign * c;
          } else {
            model.H(row, index_of(tok[k + 2], 'y', q, lineno)) = -sign * c;
          }
          k += 3;
        }
      }
    }
  }
  if (m < 0) throw ParseError(lineno, "no model found");
  return model;
}

}  // namespace conesv
