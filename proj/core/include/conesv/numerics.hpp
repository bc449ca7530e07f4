#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "conesv/error.hpp"

namespace conesv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Throws InvalidInput if any entry is NaN/inf or the matrix is empty.
void require_finite(const Matrix& M, const char* what);
void require_finite(const Vector& v, const char* what);

// Largest singular value, its multiplicity and orthonormal bases of the
// associated left/right singular subspaces.
struct SpectralData {
  double sigma_max = 0.0;
  int multiplicity = 0;
  Matrix U;  // m x r
  Matrix V;  // n x r
};

// Singular values within rank_tol * sigma_max of sigma_max are grouped.
SpectralData svd_spectral(const Matrix& A, double rank_tol = kDefaultRankTol);

double spectral_norm(const Matrix& A);

// Eigenvalues ascending; columns of vectors are orthonormal.
struct SymEig {
  Vector values;
  Matrix vectors;
};

SymEig sym_eig(const Matrix& S);

// (M^T M)^{-1} M^T for a matrix with full column rank.
Matrix pinv_full_rank(const Matrix& M, double rank_tol = kDefaultRankTol);

// S = L L^T with L having rank(S) columns. Eigenvalues below
// tol * max(1, ||S||) are dropped; below -tol * max(1, ||S||) is an error.
Matrix psd_cholesky_rank(const Matrix& S, double tol = kDefaultRankTol);

// Orthonormal basis of range(M); singular values <= tol * sigma_max dropped.
Matrix orth_basis(const Matrix& M, double tol = kDefaultRankTol);

struct NnlsResult {
  Vector x;
  double residual = 0.0;  // ||Mx - b|| (or its Gram-form equivalent)
  int iterations = 0;
  bool converged = true;
};

// Lawson-Hanson active set: min ||Mx - b|| s.t. x >= 0.
NnlsResult nnls(const Matrix& M, const Vector& b);

// Same problem in normal-equation form: min 0.5 x'Qx - c'x, x >= 0, with
// Q = M'M and c = M'b. `warm` lists indices to try as the initial passive
// set. `bnorm2` = ||b||^2 is only used to report the residual.
// Cholesky factor of the last passive block, reused when a later solve
// lands on the same index set. Only valid across calls sharing one Q.
struct NnlsFactorCache {
  std::vector<int> index;
  Eigen::LLT<Matrix> llt;
};

NnlsResult nnls_gram(const Matrix& Q, const Vector& c, double bnorm2,
                     const std::vector<int>& warm = {}, int max_iter = -1,
                     NnlsFactorCache* cache = nullptr);

// Euclidean projection onto {x >= 0, sum x = 1}.
Vector project_simplex(const Vector& z);

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

// min c'x s.t. A_ub x <= b_ub, lower <= x <= upper (entries may be +-inf).
// Bounded-variable primal simplex, Dantzig pricing with a Bland fallback.
// Throws NumericalFailure if the iteration guard trips.
LpResult lp_solve(const Vector& c, const Matrix& A_ub, const Vector& b_ub,
                  const Vector& lower, const Vector& upper);

}  // namespace conesv
