#include <algorithm>
#include <cmath>

#include "conesv/numerics.hpp"

namespace conesv {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;

// Row-major so the pivot's row updates run over contiguous memory.
using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Standard-form working problem: T x = rhs, 0 <= x <= ub, with a dense
// tableau kept as B^{-1} [A | I | art].
class BoundedSimplex {
 public:
  BoundedSimplex(Tableau T, Vector xB, std::vector<int> basis, Vector ub)
      : T_(std::move(T)), xB_(std::move(xB)), basis_(std::move(basis)), ub_(std::move(ub)) {
    const int N = static_cast<int>(T_.cols());
    status_.assign(N, 0);
    for (int b : basis_) status_[b] = -1;
  }

  // Returns false if unbounded.
  bool run(const Vector& cost, int& iterations, int max_iter) {
    const int R = static_cast<int>(T_.rows());
    const int N = static_cast<int>(T_.cols());
    Vector d = cost;
    for (int i = 0; i < R; ++i) d -= cost(basis_[i]) * T_.row(i).transpose();
    const double dtol = 1e-10 * std::max(1.0, cost.cwiseAbs().maxCoeff());
    bool bland = false;
    int degenerate = 0;
    while (true) {
      int enter = -1;
      double best = 0.0;
      for (int j = 0; j < N; ++j) {
        if (status_[j] < 0 || ub_(j) <= 0.0) continue;
        double gain = 0.0;
        if (status_[j] == 0 && d(j) < -dtol) gain = -d(j);
        if (status_[j] == 1 && d(j) > dtol) gain = d(j);
        if (gain <= 0.0) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (gain > best) {
          best = gain;
          enter = j;
        }
      }
      if (enter < 0) return true;
      if (++iterations > max_iter)
        throw Error(ErrorCode::NumericalFailure, "lp_solve: iteration guard tripped");

      const double dir = status_[enter] == 0 ? 1.0 : -1.0;
      double theta = ub_(enter);
      int leave = -1;
      bool leave_to_upper = false;
      double leave_piv = 0.0;
      for (int i = 0; i < R; ++i) {
        const double delta = dir * T_(i, enter);
        double lim;
        bool to_upper;
        if (delta > kPivotTol) {
          lim = std::max(0.0, xB_(i)) / delta;
          to_upper = false;
        } else if (delta < -kPivotTol && std::isfinite(ub_(basis_[i]))) {
          lim = std::max(0.0, ub_(basis_[i]) - xB_(i)) / (-delta);
          to_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (lim < theta - 1e-12) {
          take = true;
        } else if (lim <= theta + 1e-12 && leave >= 0) {
          take = bland ? basis_[i] < basis_[leave] : std::abs(delta) > leave_piv;
        } else if (lim <= theta && leave < 0) {
          take = true;
        }
        if (take) {
          theta = lim;
          leave = i;
          leave_to_upper = to_upper;
          leave_piv = std::abs(delta);
        }
      }
      if (!std::isfinite(theta)) return false;

      degenerate = theta < 1e-12 ? degenerate + 1 : 0;
      if (degenerate > 50) bland = true;

      xB_ -= (theta * dir) * T_.col(enter);
      if (leave < 0) {
        status_[enter] = status_[enter] == 0 ? 1 : 0;
        continue;
      }
      const double enter_value = status_[enter] == 0 ? theta : ub_(enter) - theta;
      const int old = basis_[leave];
      status_[old] = leave_to_upper ? 1 : 0;
      basis_[leave] = enter;
      status_[enter] = -1;
      xB_(leave) = enter_value;

      const double piv = T_(leave, enter);
      T_.row(leave) /= piv;
      const auto prow = T_.row(leave);
      for (int i = 0; i < R; ++i) {
        if (i == leave) continue;
        const double f = T_(i, enter);
        if (f != 0.0) T_.row(i).noalias() -= f * prow;
      }
      const double fd = d(enter);
      d -= fd * T_.row(leave).transpose();
      for (int i = 0; i < R; ++i) {
        const double u = ub_(basis_[i]);
        if (xB_(i) < 0.0 && xB_(i) > -kFeasTol) xB_(i) = 0.0;
        if (std::isfinite(u) && xB_(i) > u && xB_(i) < u + kFeasTol) xB_(i) = u;
      }
    }
  }

  Vector values() const {
    const int N = static_cast<int>(T_.cols());
    Vector x(N);
    for (int j = 0; j < N; ++j) x(j) = status_[j] == 1 ? ub_(j) : 0.0;
    for (int i = 0; i < static_cast<int>(basis_.size()); ++i) x(basis_[i]) = xB_(i);
    return x;
  }

  void fix_to_zero(int j) { ub_(j) = 0.0; }

 private:
  Tableau T_;
  Vector xB_;
  std::vector<int> basis_;
  Vector ub_;
  std::vector<int> status_;
};

struct ColumnMap {
  int col;
  double sign;
};

}  // namespace

LpResult lp_solve(const Vector& c, const Matrix& A_ub, const Vector& b_ub,
                  const Vector& lower, const Vector& upper) {
  const int n = static_cast<int>(c.size());
  const int R = static_cast<int>(A_ub.rows());
  if ((R > 0 && A_ub.cols() != n) || b_ub.size() != R || lower.size() != n || upper.size() != n)
    throw Error(ErrorCode::InvalidInput, "lp_solve: dimension mismatch");
  if (!c.allFinite() || (R > 0 && !A_ub.allFinite()) || !b_ub.allFinite())
    throw Error(ErrorCode::InvalidInput, "lp_solve: non-finite data");

  LpResult out;
  for (int j = 0; j < n; ++j)
    if (lower(j) > upper(j) || lower(j) == kInf || upper(j) == -kInf) return out;

  // Shift/reflect/split so every working column lives in [0, ub].
  std::vector<std::vector<ColumnMap>> map(n);
  Vector offset = Vector::Zero(n);
  std::vector<double> col_ub;
  for (int j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lower(j));
    const bool hi = std::isfinite(upper(j));
    if (lo) {
      offset(j) = lower(j);
      map[j].push_back({static_cast<int>(col_ub.size()), 1.0});
      col_ub.push_back(hi ? upper(j) - lower(j) : kInf);
    } else if (hi) {
      offset(j) = upper(j);
      map[j].push_back({static_cast<int>(col_ub.size()), -1.0});
      col_ub.push_back(kInf);
    } else {
      map[j].push_back({static_cast<int>(col_ub.size()), 1.0});
      col_ub.push_back(kInf);
      map[j].push_back({static_cast<int>(col_ub.size()), -1.0});
      col_ub.push_back(kInf);
    }
  }
  const int S = static_cast<int>(col_ub.size());
  Vector rhs = R > 0 ? Vector(b_ub - A_ub * offset) : Vector(0);
  // Rows that are tight at the shifted origin come out as -1e-17 and would
  // otherwise each force an artificial and a phase-1 solve.
  const double rhs_snap = 1e-13 * (1.0 + (R > 0 ? b_ub.cwiseAbs().maxCoeff() : 0.0));
  int n_art = 0;
  for (int i = 0; i < R; ++i) {
    if (rhs(i) < 0.0 && rhs(i) > -rhs_snap) rhs(i) = 0.0;
    if (rhs(i) < 0.0) ++n_art;
  }
  const int N = S + R + n_art;

  Tableau T = Tableau::Zero(R, N);
  Vector ub(N);
  for (int k = 0; k < S; ++k) ub(k) = col_ub[k];
  for (int k = S; k < N; ++k) ub(k) = kInf;
  Vector xB(R);
  std::vector<int> basis(R);
  int art = S + R;
  for (int i = 0; i < R; ++i) {
    const double sgn = rhs(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j)
      for (const ColumnMap& cm : map[j]) T(i, cm.col) = sgn * cm.sign * A_ub(i, j);
    T(i, S + i) = sgn;
    xB(i) = sgn * rhs(i);
    if (sgn < 0.0) {
      T(i, art) = 1.0;
      basis[i] = art++;
    } else {
      basis[i] = S + i;
    }
  }

  Vector cost = Vector::Zero(N);
  for (int j = 0; j < n; ++j)
    for (const ColumnMap& cm : map[j]) cost(cm.col) = cm.sign * c(j);

  BoundedSimplex lp(std::move(T), std::move(xB), std::move(basis), ub);
  const int max_iter = 50 * (N + R) + 1000;
  int iterations = 0;
  if (n_art > 0) {
    Vector phase1 = Vector::Zero(N);
    phase1.tail(n_art).setOnes();
    lp.run(phase1, iterations, max_iter);
    const Vector v = lp.values();
    const double infeas = v.tail(n_art).sum();
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    if (infeas > 1e-8 * scale) {
      out.iterations = iterations;
      return out;
    }
    for (int k = S + R; k < N; ++k) lp.fix_to_zero(k);
  }
  const bool bounded = lp.run(cost, iterations, max_iter);
  out.iterations = iterations;
  if (!bounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  const Vector v = lp.values();
  out.x = offset;
  for (int j = 0; j < n; ++j)
    for (const ColumnMap& cm : map[j]) out.x(j) += cm.sign * v(cm.col);
  for (int j = 0; j < n; ++j) out.x(j) = std::clamp(out.x(j), lower(j), upper(j));
  if (R > 0) {
    const Vector viol = A_ub * out.x - b_ub;
    const double scale = 1.0 + std::max(b_ub.cwiseAbs().maxCoeff(),
                                        (A_ub.cwiseAbs() * out.x.cwiseAbs()).maxCoeff());
    if (viol.maxCoeff() > 1e-7 * scale)
      throw Error(ErrorCode::NumericalFailure, "lp_solve: solution violates constraints");
  }
  out.status = LpStatus::Optimal;
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace conesv
