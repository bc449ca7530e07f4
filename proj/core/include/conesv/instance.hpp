#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conesv/cones.hpp"

namespace conesv {

// min <u, A v> over unit u in P, unit v in Q.
class SVInstance {
 public:
  SVInstance(Matrix A, PolyhedralCone P, PolyhedralCone Q, double rank_tol = kDefaultRankTol);

  const Matrix& A() const { return A_; }
  const PolyhedralCone& P() const { return P_; }
  const PolyhedralCone& Q() const { return Q_; }
  const SpectralData& spectral() const { return spectral_; }
  // G^T A H.
  const Matrix& cross() const { return cross_; }
  double norm() const { return spectral_.sigma_max; }
  int m() const { return static_cast<int>(A_.rows()); }
  int n() const { return static_cast<int>(A_.cols()); }

 private:
  Matrix A_;
  PolyhedralCone P_, Q_;
  SpectralData spectral_;
  Matrix cross_;
};

// Orthants on both sides.
SVInstance make_psv(const Matrix& A);
// A = identity.
SVInstance make_ma(const PolyhedralCone& P, const PolyhedralCone& Q);

enum class Status { ExactGlobal, BoundPair, Heuristic };

const char* to_string(Status s);

struct Solution {
  Vector u, v;
  double lambda = 0.0;
  Status status = Status::Heuristic;
  // For BoundPair the optimum lies in [lower, upper]; otherwise both equal lambda.
  double lower = 0.0;
  double upper = 0.0;
  double kkt_residual = 0.0;
  std::vector<int> support_I, support_J;
  double wall_time = 0.0;
  std::string method;
  long long work = 0;  // pairs / nodes / iterations, solver dependent

  // arccos(lambda) when |lambda| <= 1, NaN otherwise.
  double angle() const;
};

// Residual of the first-order conditions in generator coordinates; zero iff
// (u, v) is a critical pair. Gradient terms are divided by max(1, ||A||).
double kkt_residual(const SVInstance& inst, const Vector& u, const Vector& v);

inline constexpr double kExactKktTol = 1e-7;
inline constexpr double kHeuristicKktTol = 1e-6;

// Builds a Solution with lambda = <u, A v>, supports and kkt_residual filled in.
Solution make_solution(const SVInstance& inst, const Vector& u, const Vector& v, Status status,
                       const std::string& method);

// Every solver passes its returned Solution through here; an installed
// observer sees each one (used by certification tests).
using SolutionObserver = std::function<void(const Solution&)>;
void set_solution_observer(SolutionObserver obs);
void emit_solution(const Solution& sol);

enum class PreprocessKind { NonnegativeCase, ExtremeCase, None };

struct PreprocessOutcome {
  PreprocessKind kind = PreprocessKind::None;
  std::optional<Solution> solution;
};

// G^T A H >= -tol: the optimum is its smallest entry, attained at a
// generator pair.
PreprocessOutcome check_nonnegative_case(const SVInstance& inst, double tol = 1e-12);

enum class ExtremeMode { Deterministic, Randomized };

// Decides whether the optimum equals -||A||, i.e. some top singular pair has
// its left vector in -P and right vector in Q.
PreprocessOutcome check_extreme_case(const SVInstance& inst,
                                     ExtremeMode mode = ExtremeMode::Deterministic,
                                     std::uint64_t seed = 0);

// Runs both checks in order.
PreprocessOutcome preprocess(const SVInstance& inst);

// Equivalent angle problem between lifted cones in R^{m'+s}.
struct MAReduction {
  SVInstance ma;
  bool transposed = false;
  double scale = 1.0;  // optimum(inst) = scale * optimum(ma)
  int m = 0;           // rows of the (possibly transposed) A
  Matrix lift_q;       // [A_hat; L^T], maps the Q-side into the lifted space

  // Lifted unit pair -> unit pair of the original instance.
  std::pair<Vector, Vector> back_map(const Vector& x, const Vector& y) const;
};

MAReduction reduce_to_ma(const SVInstance& inst);

// m + n - multiplicity of ||A||: no local minimizer needs a larger support.
int saddle_cardinality_bound(const SVInstance& inst);

// Indices that may carry support in some optimal pair. When both Gram
// matrices are entrywise nonnegative, rows/columns of G^T A H without a
// negative entry (iterated) can be dropped; otherwise everything is kept.
struct SupportUniverse {
  std::vector<int> rows;
  std::vector<int> cols;
};
SupportUniverse support_universe(const SVInstance& inst);

}  // namespace conesv
