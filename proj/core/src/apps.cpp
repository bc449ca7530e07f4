#include "conesv/apps.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace conesv {

GeneratedInstance gen_schur_orthant(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "gen_schur_orthant: n must be >= 2");
  GeneratedInstance g{"schur-orthant-" + std::to_string(n), make_ma(schur_cone(n), orthant(n)),
                      -std::sqrt(1.0 - 1.0 / n), std::nullopt, std::nullopt};
  Vector u = Vector::Constant(n, 1.0 / n);
  u(n - 1) -= 1.0;
  g.known_u = u / u.norm();
  g.known_v = Vector::Unit(n, n - 1);
  return g;
}

GeneratedInstance gen_schur_schur(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "gen_schur_schur: n must be >= 2");
  return {"schur-schur-" + std::to_string(n), make_ma(schur_cone(n), schur_cone(n)),
          std::cos((n - 1) * std::numbers::pi / n), std::nullopt, std::nullopt};
}

BicliqueInstance biclique_instance(const Matrix& B) {
  require_finite(B, "biclique_instance");
  for (Eigen::Index i = 0; i < B.size(); ++i)
    if (B.data()[i] != 0.0 && B.data()[i] != 1.0)
      throw Error(ErrorCode::InvalidInput, "biclique_instance: B must be 0/1");
  const int d = static_cast<int>(std::max(B.rows(), B.cols()));
  const Matrix M = B - (Matrix::Ones(B.rows(), B.cols()) - B) * d;
  return {B, d, make_psv(-M), {}, {}};
}

BicliqueInstance gen_biclique(int m, int n, double density, int rows, int cols,
                              std::uint64_t seed) {
  if (m < 1 || n < 1 || rows < 0 || cols < 0 || rows > m || cols > n || density < 0.0 ||
      density > 1.0)
    throw Error(ErrorCode::InvalidInput, "gen_biclique: bad parameters");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(density);
  Matrix B(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = edge(rng) ? 1.0 : 0.0;
  std::vector<int> r(m), c(n);
  for (int i = 0; i < m; ++i) r[i] = i;
  for (int j = 0; j < n; ++j) c[j] = j;
  std::shuffle(r.begin(), r.end(), rng);
  std::shuffle(c.begin(), c.end(), rng);
  r.resize(rows);
  c.resize(cols);
  std::sort(r.begin(), r.end());
  std::sort(c.begin(), c.end());
  for (int i : r)
    for (int j : c) B(i, j) = 1.0;
  if (B.sum() == 0.0) throw Error(ErrorCode::InvalidInput, "gen_biclique: graph has no edges");
  BicliqueInstance bi = biclique_instance(B);
  bi.planted_rows = r;
  bi.planted_cols = c;
  return bi;
}

BicliqueExtraction extract_biclique(const BicliqueInstance& bi, const Solution& sol,
                                    double threshold) {
  BicliqueExtraction ex;
  const double umax = sol.u.cwiseAbs().maxCoeff();
  const double vmax = sol.v.cwiseAbs().maxCoeff();
  for (int i = 0; i < sol.u.size(); ++i)
    if (sol.u(i) > threshold * umax) ex.rows.push_back(i);
  for (int j = 0; j < sol.v.size(); ++j)
    if (sol.v(j) > threshold * vmax) ex.cols.push_back(j);
  ex.edge_estimate = std::llround(sol.lambda * sol.lambda);
  ex.valid = !ex.rows.empty() && !ex.cols.empty();
  for (int i : ex.rows)
    for (int j : ex.cols)
      if (bi.B(i, j) != 1.0) ex.valid = false;
  return ex;
}

namespace {

// Next non-empty line with comments stripped.
bool next_data_line(std::istream& is, std::string& out, int& lineno) {
  std::string line;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out = line;
    return true;
  }
  return false;
}

}  // namespace

Matrix read_edge_list(std::istream& is) {
  std::string line;
  int lineno = 0;
  if (!next_data_line(is, line, lineno)) throw ParseError(lineno, "missing 'm n' header");
  std::istringstream hs(line);
  long long m = 0, n = 0;
  std::string extra;
  if (!(hs >> m >> n) || (hs >> extra)) throw ParseError(lineno, "header must be 'm n'");
  if (m < 1 || n < 1) throw ParseError(lineno, "dimensions must be positive");
  Matrix B = Matrix::Zero(m, n);
  while (next_data_line(is, line, lineno)) {
    std::istringstream ls(line);
    long long a = 0, b = 0;
    if (!(ls >> a >> b) || (ls >> extra)) throw ParseError(lineno, "expected 'u v'");
    if (a < 1 || a > m || b < 1 || b > n) throw ParseError(lineno, "vertex index out of range");
    B(a - 1, b - 1) = 1.0;
  }
  return B;
}

void write_edge_list(std::ostream& os, const Matrix& B) {
  os << B.rows() << ' ' << B.cols() << '\n';
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      if (B(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << '\n';
}

CirculantReduction gen_circulant(int n) {
  if (n < 3 || n % 2 == 0)
    throw Error(ErrorCode::InvalidInput, "gen_circulant: n must be odd and >= 3");
  const int m = (n - 1) / 2;
  Matrix M(m, m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      M(i - 1, j - 1) = 2.0 / std::sqrt(static_cast<double>(n)) *
                        std::cos(2.0 * std::numbers::pi * i * j / n);
  return {n, m, make_psv(M)};
}

CirculantPair reconstruct_circulant(const CirculantReduction& red, const Vector& u,
                                    const Vector& v) {
  const int n = red.n;
  const int m = red.m;
  if (u.size() != m || v.size() != m)
    throw Error(ErrorCode::InvalidInput, "reconstruct_circulant: wrong vector length");
  const Vector a = std::sqrt(2.0 * n) * u;
  const Vector lam = std::sqrt(2.0) * v;
  CirculantPair out;
  out.N = Matrix::Zero(n, n);
  out.P = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int k = ((c - r) % n + n) % n;
      const int off = std::min(k, n - k);  // 0 on the diagonal
      out.N(r, c) = off == 0 ? 0.0 : a(off - 1);
      double s = 0.0;
      for (int j = 1; j <= m; ++j)
        s += lam(j - 1) * (2.0 / n) * std::cos(2.0 * std::numbers::pi * (r - c) * j / n);
      out.P(r, c) = s;
    }
  const double cosang = (out.P.cwiseProduct(out.N)).sum() / (out.P.norm() * out.N.norm());
  out.angle = std::acos(std::clamp(cosang, -1.0, 1.0));
  return out;
}

MatrixConeAngle ma_psd_nn(int n, const MultistartConfig& cfg) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "ma_psd_nn: n must be >= 2");
  const int d = svec_dim(n);
  const Matrix I = Matrix::Identity(d, d);
  MatrixConeAngle out;
  out.runs = multistart_eao(I, [n]() { return psd_oracle(n); }, [n]() { return nonneg_sym_oracle(n); },
                            cfg);
  out.lambda = out.runs.best.value;
  out.angle = std::acos(std::clamp(out.lambda, -1.0, 1.0));
  out.X = smat(out.runs.best.u, n);
  out.Y = smat(out.runs.best.v, n);
  out.kkt_residual = oracle_kkt_residual(I, psd_oracle(n), nonneg_sym_oracle(n), out.runs.best.u,
                                         out.runs.best.v);
  return out;
}

}  // namespace conesv
