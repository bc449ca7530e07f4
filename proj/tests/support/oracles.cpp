#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix columns(const Matrix& M, std::uint32_t mask) {
  std::vector<int> idx;
  for (int j = 0; j < M.cols(); ++j)
    if (mask >> j & 1u) idx.push_back(j);
  Matrix out(M.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out.col(k) = M.col(idx[k]);
  return out;
}

// Simplex grid points with the given resolution, normalized to the sphere.
void simplex_grid(int dim, int res, std::vector<Vector>& out) {
  std::vector<int> c(dim, 0);
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == dim - 1) {
      c[k] = left;
      Vector x(dim);
      for (int i = 0; i < dim; ++i) x(i) = c[i];
      out.push_back(x / x.norm());
      return;
    }
    for (int t = 0; t <= left; ++t) {
      c[k] = t;
      rec(k + 1, left - t);
    }
  };
  rec(0, res);
}

// Unit element of cone(G) minimizing <., c>, via bruteforce projection.
Vector cone_linmin(const Matrix& G, const Vector& c) {
  const bool identity = G.rows() == G.cols() && G.isIdentity(0.0);
  const Vector p = identity ? Vector((-c).cwiseMax(0.0)) : cone_projection_bruteforce(G, -c);
  if (p.norm() > 1e-12 * std::max(1.0, c.norm())) return p / p.norm();
  Eigen::Index j = 0;
  (G.transpose() * c).minCoeff(&j);
  return G.col(j) / G.col(j).norm();
}

}  // namespace

Vector nnls_bruteforce(const Matrix& M, const Vector& b) {
  const int n = static_cast<int>(M.cols());
  Vector best = Vector::Zero(n);
  double best_res = b.norm();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const Matrix Ms = columns(M, mask);
    const Vector xs = Ms.colPivHouseholderQr().solve(b);
    if ((xs.array() <= 0.0).any()) continue;
    const double res = (Ms * xs - b).norm();
    if (res < best_res - 1e-14) {
      best_res = res;
      best.setZero();
      int k = 0;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1u) best(j) = xs(k++);
    }
  }
  return best;
}

Vector simplex_projection_bruteforce(const Vector& z) {
  const int n = static_cast<int>(z.size());
  Vector best;
  double best_d = kInf;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) {
        sum += z(j);
        ++k;
      }
    const double shift = (sum - 1.0) / k;
    Vector x = Vector::Zero(n);
    bool ok = true;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) {
        x(j) = z(j) - shift;
        if (x(j) < 0.0) ok = false;
      }
    if (!ok) continue;
    const double d = (x - z).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = x;
    }
  }
  return best;
}

double lp_vertex_enumeration(const Vector& c, const Matrix& A, const Vector& b,
                             const Vector& lower, const Vector& upper, Vector* argmin) {
  const int n = static_cast<int>(c.size());
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (int i = 0; i < A.rows(); ++i) {
    rows.push_back(A.row(i).transpose());
    rhs.push_back(b(i));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lower(j))) {
      rows.push_back(-Vector::Unit(n, j));
      rhs.push_back(-lower(j));
    }
    if (std::isfinite(upper(j))) {
      rows.push_back(Vector::Unit(n, j));
      rhs.push_back(upper(j));
    }
  }
  const int R = static_cast<int>(rows.size());
  double best = kInf;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int k, int start) {
    if (k == n) {
      Matrix S(n, n);
      Vector r(n);
      for (int t = 0; t < n; ++t) {
        S.row(t) = rows[pick[t]].transpose();
        r(t) = rhs[pick[t]];
      }
      Eigen::FullPivLU<Matrix> lu(S);
      if (lu.rank() < n) return;
      const Vector x = lu.solve(r);
      for (int t = 0; t < R; ++t)
        if (rows[t].dot(x) > rhs[t] + 1e-9) return;
      const double val = c.dot(x);
      if (val < best) {
        best = val;
        if (argmin) *argmin = x;
      }
      return;
    }
    for (int t = start; t < R; ++t) {
      pick[k] = t;
      rec(k + 1, t + 1);
    }
  };
  rec(0, 0);
  return best;
}

Vector cone_projection_bruteforce(const Matrix& G, const Vector& z) {
  const Vector x = nnls_bruteforce(G, z);
  return G * x;
}

double sv_grid_oracle(const Matrix& A, const Matrix& G, const Matrix& H, int resolution) {
  // Grid over the generator-coefficient simplex of the side with fewer
  // generators; the other side is solved exactly by cone_linmin.
  const bool left = G.cols() <= H.cols();
  const Matrix& K = left ? G : H;
  std::vector<Vector> grid;
  simplex_grid(static_cast<int>(K.cols()), resolution, grid);
  struct Pt {
    double val;
    Vector u, v;
  };
  std::vector<Pt> pts;
  for (const Vector& w : grid) {
    Vector s = K * w;
    if (s.norm() < 1e-12) continue;
    s /= s.norm();
    if (left) {
      const Vector v = cone_linmin(H, A.transpose() * s);
      pts.push_back({s.dot(A * v), s, v});
    } else {
      const Vector u = cone_linmin(G, A * s);
      pts.push_back({u.dot(A * s), u, s});
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.val < b.val; });
  double best = pts.front().val;
  const int polish = std::min<int>(25, static_cast<int>(pts.size()));
  for (int t = 0; t < polish; ++t) {
    Vector u = pts[t].u, v = pts[t].v;
    for (int it = 0; it < 3000; ++it) {
      const Vector u0 = u, v0 = v;
      u = cone_linmin(G, A * v);
      v = cone_linmin(H, A.transpose() * u);
      if ((u - u0).norm() + (v - v0).norm() < 1e-14) break;
    }
    best = std::min(best, u.dot(A * v));
  }
  return best;
}

double psv_grid_oracle(const Matrix& A, int resolution) {
  return sv_grid_oracle(A, Matrix::Identity(A.rows(), A.rows()),
                        Matrix::Identity(A.cols(), A.cols()), resolution);
}

long long max_biclique_edges(const Matrix& B) {
  const int n = static_cast<int>(B.cols());
  // Rows without edges never help, so only the others are enumerated.
  std::vector<std::uint64_t> nbr;
  for (int i = 0; i < B.rows(); ++i) {
    std::uint64_t row = 0;
    for (int j = 0; j < n; ++j)
      if (B(i, j) != 0.0) row |= std::uint64_t{1} << j;
    if (row) nbr.push_back(row);
  }
  const int m = static_cast<int>(nbr.size());
  long long best = 0;
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::uint64_t common = all;
    int k = 0;
    for (int i = 0; i < m; ++i)
      if (mask >> i & 1u) {
        common &= nbr[i];
        ++k;
      }
    best = std::max(best, static_cast<long long>(k) * __builtin_popcountll(common));
  }
  return best;
}

}  // namespace oracle
