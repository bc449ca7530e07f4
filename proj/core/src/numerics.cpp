#include "conesv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conesv {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvalidGenerator: return "InvalidGenerator";
    case ErrorCode::NotPointed: return "NotPointed";
    case ErrorCode::NoImprovingDirection: return "NoImprovingDirection";
    case ErrorCode::NonPointedDegeneracy: return "NonPointedDegeneracy";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

void require_finite(const Matrix& M, const char* what) {
  if (M.rows() == 0 || M.cols() == 0)
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": empty matrix");
  if (!M.allFinite())
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite entry");
}

void require_finite(const Vector& v, const char* what) {
  if (v.size() == 0)
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": empty vector");
  if (!v.allFinite())
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite entry");
}

SpectralData svd_spectral(const Matrix& A, double rank_tol) {
  require_finite(A, "svd_spectral");
  if (!(rank_tol > 0.0 && rank_tol <= 1e-4))
    throw Error(ErrorCode::InvalidInput, "svd_spectral: rank_tol must lie in (0, 1e-4]");
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  SpectralData out;
  out.sigma_max = s(0);
  int r = 0;
  while (r < s.size() && out.sigma_max - s(r) <= rank_tol * out.sigma_max) ++r;
  out.multiplicity = r;
  out.U = svd.matrixU().leftCols(r);
  out.V = svd.matrixV().leftCols(r);
  return out;
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(A);
  return svd.singularValues()(0);
}

SymEig sym_eig(const Matrix& S) {
  require_finite(S, "sym_eig");
  if (S.rows() != S.cols())
    throw Error(ErrorCode::InvalidInput, "sym_eig: matrix is not square");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::InvalidInput, "sym_eig: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "sym_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix pinv_full_rank(const Matrix& M, double rank_tol) {
  require_finite(M, "pinv_full_rank");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol * s(0)) ++rank;
  if (s(0) == 0.0) rank = 0;
  if (rank < M.cols())
    throw RankDeficientError(rank, "pinv_full_rank: column rank " + std::to_string(rank) +
                                       " < " + std::to_string(M.cols()));
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

Matrix psd_cholesky_rank(const Matrix& S, double tol) {
  SymEig eig = sym_eig(S);
  const double norm = eig.values.cwiseAbs().maxCoeff();
  const double thresh = tol * std::max(1.0, norm);
  if (eig.values(0) < -thresh)
    throw Error(ErrorCode::NotPSD, "psd_cholesky_rank: negative eigenvalue " +
                                       std::to_string(eig.values(0)));
  const int n = static_cast<int>(S.rows());
  int first = 0;
  while (first < n && eig.values(first) <= thresh) ++first;
  const int rank = n - first;
  Matrix L(n, rank);
  for (int k = 0; k < rank; ++k)
    L.col(k) = eig.vectors.col(first + k) * std::sqrt(eig.values(first + k));
  return L;
}

Matrix orth_basis(const Matrix& M, double tol) {
  if (M.rows() == 0) return Matrix(0, 0);
  if (M.cols() == 0) return Matrix(M.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  int r = 0;
  if (s(0) > 0.0)
    while (r < s.size() && s(r) > tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

namespace {

// Solves Q_PP s_P = c_P; entries outside P are zero.
Vector solve_passive(const Matrix& Q, const Vector& c, const std::vector<char>& passive,
                     NnlsFactorCache* cache) {
  std::vector<int> idx;
  for (int j = 0; j < static_cast<int>(passive.size()); ++j)
    if (passive[j]) idx.push_back(j);
  Vector s = Vector::Zero(c.size());
  if (idx.empty()) return s;
  const int k = static_cast<int>(idx.size());
  Vector cp(k);
  for (int a = 0; a < k; ++a) cp(a) = c(idx[a]);
  Vector sp;
  if (cache && cache->index == idx) {
    sp = cache->llt.solve(cp);
  } else {
    Matrix Qp(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) Qp(a, b) = Q(idx[a], idx[b]);
    Eigen::LLT<Matrix> llt(Qp);
    if (llt.info() == Eigen::Success) {
      sp = llt.solve(cp);
      if (cache) {
        cache->index = idx;
        cache->llt = std::move(llt);
      }
    } else {
      sp = Qp.completeOrthogonalDecomposition().solve(cp);
    }
  }
  for (int a = 0; a < k; ++a) s(idx[a]) = sp(a);
  return s;
}

}  // namespace

NnlsResult nnls_gram(const Matrix& Q, const Vector& c, double bnorm2,
                     const std::vector<int>& warm, int max_iter, NnlsFactorCache* cache) {
  const int n = static_cast<int>(c.size());
  if (Q.rows() != n || Q.cols() != n)
    throw Error(ErrorCode::InvalidInput, "nnls_gram: dimension mismatch");
  if (max_iter < 0) max_iter = 10 * std::max(n, 1);
  NnlsResult res;
  res.x = Vector::Zero(n);
  if (n == 0) {
    res.residual = std::sqrt(std::max(0.0, bnorm2));
    return res;
  }
  const double tol = 1e-13 * std::max({1.0, c.cwiseAbs().maxCoeff(), Q.diagonal().maxCoeff()});

  std::vector<char> passive(n, 0);
  Vector& x = res.x;

  if (!warm.empty()) {
    for (int j : warm)
      if (j >= 0 && j < n) passive[j] = 1;
    for (int round = 0; round <= n; ++round) {
      Vector s = solve_passive(Q, c, passive, cache);
      bool ok = true;
      for (int j = 0; j < n; ++j)
        if (passive[j] && !(s(j) > 0.0)) {
          passive[j] = 0;
          ok = false;
        }
      if (ok) {
        x = s;
        break;
      }
    }
    for (int j = 0; j < n; ++j)
      if (!passive[j]) x(j) = 0.0;
  }

  std::vector<char> blocked(n, 0);
  int iter = 0;
  while (true) {
    Vector w = c - Q * x;
    int t = -1;
    double best = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && !blocked[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    if (t < 0) break;
    if (iter >= max_iter) {
      res.converged = false;
      break;
    }
    ++iter;
    passive[t] = 1;
    bool first = true;
    while (true) {
      Vector s = solve_passive(Q, c, passive, cache);
      if (first && !(s(t) > 0.0)) {
        // Entering column gives no progress numerically; skip it for now.
        passive[t] = 0;
        blocked[t] = 1;
        break;
      }
      first = false;
      double alpha = 1.0;
      int hit = -1;
      for (int j = 0; j < n; ++j)
        if (passive[j] && s(j) <= 0.0) {
          const double a = x(j) / (x(j) - s(j));
          if (a < alpha) {
            alpha = a;
            hit = j;
          }
        }
      std::fill(blocked.begin(), blocked.end(), 0);
      if (hit < 0) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      x(hit) = 0.0;
      for (int j = 0; j < n; ++j)
        if (passive[j] && x(j) <= 0.0) {
          passive[j] = 0;
          x(j) = 0.0;
        }
      if (++iter >= max_iter) {
        res.converged = false;
        break;
      }
    }
    if (!res.converged) break;
  }
  res.iterations = iter;
  const double r2 = x.dot(Q * x) - 2.0 * c.dot(x) + bnorm2;
  res.residual = std::sqrt(std::max(0.0, r2));
  return res;
}

NnlsResult nnls(const Matrix& M, const Vector& b) {
  require_finite(M, "nnls");
  if (b.size() != M.rows()) throw Error(ErrorCode::InvalidInput, "nnls: dimension mismatch");
  if (!b.allFinite()) throw Error(ErrorCode::InvalidInput, "nnls: non-finite rhs");
  const Matrix Q = M.transpose() * M;
  const Vector c = M.transpose() * b;
  const int cap = 10 * static_cast<int>(std::max(M.rows(), M.cols()));
  NnlsResult res = nnls_gram(Q, c, b.squaredNorm(), {}, cap);

  // Recompute the passive block by QR to avoid the squared conditioning of
  // the normal equations.
  std::vector<int> idx;
  for (int j = 0; j < res.x.size(); ++j)
    if (res.x(j) > 0.0) idx.push_back(j);
  if (!idx.empty()) {
    Matrix Mp(M.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t a = 0; a < idx.size(); ++a) Mp.col(a) = M.col(idx[a]);
    Vector sp = Mp.colPivHouseholderQr().solve(b);
    if ((sp.array() > 0.0).all()) {
      for (size_t a = 0; a < idx.size(); ++a) res.x(idx[a]) = sp(a);
    }
  }
  res.residual = (M * res.x - b).norm();
  return res;
}

Vector project_simplex(const Vector& z) {
  require_finite(z, "project_simplex");
  const int n = static_cast<int>(z.size());
  std::vector<double> s(z.data(), z.data() + n);
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  for (int k = 0; k < n; ++k) {
    cum += s[k];
    const double t = (cum - 1.0) / (k + 1);
    if (s[k] - t > 0.0) theta = t;
  }
  return (z.array() - theta).max(0.0).matrix();
}

}  // namespace conesv
