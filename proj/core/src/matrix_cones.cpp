#include <cmath>

#include "conesv/cones.hpp"

namespace conesv {

int svec_dim(int n) { return n * (n + 1) / 2; }

Vector svec(const Matrix& S) {
  if (S.rows() != S.cols()) throw Error(ErrorCode::InvalidInput, "svec: matrix is not square");
  const int n = static_cast<int>(S.rows());
  const double r2 = std::sqrt(2.0);
  Vector v(svec_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v(k++) = i == j ? S(i, i) : r2 * 0.5 * (S(i, j) + S(j, i));
  return v;
}

Matrix smat(const Vector& v, int n) {
  if (v.size() != svec_dim(n)) throw Error(ErrorCode::InvalidInput, "smat: length mismatch");
  const double r2 = std::sqrt(2.0);
  Matrix S(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double x = i == j ? v(k) : v(k) / r2;
      S(i, j) = x;
      S(j, i) = x;
      ++k;
    }
  return S;
}

namespace {

Matrix clamp_eigen(const Matrix& S, bool keep_positive) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "psd oracle: eigensolver failed");
  Vector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i)
    lam(i) = keep_positive ? std::max(lam(i), 0.0) : std::max(-lam(i), 0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

ConeOracle psd_oracle(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "psd_oracle: n must be >= 1");
  ConeOracle o;
  o.descriptor = "psd(" + std::to_string(n) + ")";
  o.dim = svec_dim(n);
  o.project = [n](const Vector& z) { return svec(clamp_eigen(smat(z, n), true)); };
  o.best_generator = [n](const Vector& c) -> Vector {
    const Matrix neg = clamp_eigen(smat(c, n), false);
    const double nrm = neg.norm();
    if (!(nrm > 1e-14 * std::max(1.0, c.norm())))
      throw Error(ErrorCode::NoImprovingDirection, "psd_oracle: matrix has no negative part");
    return svec(neg / nrm);
  };
  return o;
}

ConeOracle nonneg_sym_oracle(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "nonneg_sym_oracle: n must be >= 1");
  ConeOracle o;
  o.descriptor = "nonneg_sym(" + std::to_string(n) + ")";
  o.dim = svec_dim(n);
  o.project = [](const Vector& z) -> Vector { return z.cwiseMax(0.0); };
  o.best_generator = [](const Vector& c) -> Vector {
    const Vector neg = (-c).cwiseMax(0.0);
    const double nrm = neg.norm();
    if (!(nrm > 0.0))
      throw Error(ErrorCode::NoImprovingDirection, "nonneg_sym_oracle: matrix has no negative entry");
    return neg / nrm;
  };
  return o;
}

}  // namespace conesv
