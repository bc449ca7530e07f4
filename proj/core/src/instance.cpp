#include "conesv/instance.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

namespace conesv {

SVInstance::SVInstance(Matrix A, PolyhedralCone P, PolyhedralCone Q, double rank_tol)
    : A_(std::move(A)), P_(std::move(P)), Q_(std::move(Q)) {
  require_finite(A_, "SVInstance");
  if (A_.rows() != P_.ambient_dim() || A_.cols() != Q_.ambient_dim())
    throw Error(ErrorCode::InvalidInput,
                "SVInstance: A is " + std::to_string(A_.rows()) + "x" + std::to_string(A_.cols()) +
                    " but cones live in R^" + std::to_string(P_.ambient_dim()) + " and R^" +
                    std::to_string(Q_.ambient_dim()));
  if (A_.cwiseAbs().maxCoeff() == 0.0)
    throw Error(ErrorCode::InvalidInput, "SVInstance: A is zero");
  spectral_ = svd_spectral(A_, rank_tol);
  cross_ = P_.generators().transpose() * A_ * Q_.generators();
}

SVInstance make_psv(const Matrix& A) {
  return SVInstance(A, orthant(static_cast<int>(A.rows())), orthant(static_cast<int>(A.cols())));
}

SVInstance make_ma(const PolyhedralCone& P, const PolyhedralCone& Q) {
  if (P.ambient_dim() != Q.ambient_dim())
    throw Error(ErrorCode::InvalidInput, "make_ma: cones live in different spaces");
  const int n = P.ambient_dim();
  return SVInstance(Matrix::Identity(n, n), P, Q);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::ExactGlobal: return "ExactGlobal";
    case Status::BoundPair: return "BoundPair";
    case Status::Heuristic: return "Heuristic";
  }
  return "Unknown";
}

double Solution::angle() const {
  if (std::abs(lambda) > 1.0 + 1e-12) return std::nan("");
  return std::acos(std::clamp(lambda, -1.0, 1.0));
}

double kkt_residual(const SVInstance& inst, const Vector& u, const Vector& v) {
  if (u.size() != inst.m() || v.size() != inst.n())
    throw Error(ErrorCode::InvalidInput, "kkt_residual: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 1e-12) || !(nv > 1e-12) || !std::isfinite(nu) || !std::isfinite(nv))
    throw Error(ErrorCode::InvalidInput, "kkt_residual: u or v is (near) zero");
  double res = std::max(std::abs(nu - 1.0), std::abs(nv - 1.0));
  const Vector un = u / nu;
  const Vector vn = v / nv;
  const Matrix& A = inst.A();
  const Vector Av = A * vn;
  const Vector Atu = A.transpose() * un;
  const double lambda = un.dot(Av);

  const ConeProjection pu = project_cone(inst.P(), un);
  const ConeProjection pv = project_cone(inst.Q(), vn);
  res = std::max(res, (pu.point - un).norm());
  res = std::max(res, (pv.point - vn).norm());

  const double s = std::max(1.0, inst.norm());
  const Vector gx = inst.P().generators().transpose() * (Av - lambda * un) / s;
  const Vector gy = inst.Q().generators().transpose() * (Atu - lambda * vn) / s;
  res = std::max(res, std::max(0.0, -gx.minCoeff()));
  res = std::max(res, std::max(0.0, -gy.minCoeff()));
  res = std::max(res, std::abs(pu.coeffs.dot(gx)));
  res = std::max(res, std::abs(pv.coeffs.dot(gy)));
  return res;
}

namespace {

std::vector<int> support_of(const Vector& coeffs) {
  std::vector<int> s;
  if (coeffs.size() == 0) return s;
  const double mx = coeffs.maxCoeff();
  for (int j = 0; j < coeffs.size(); ++j)
    if (coeffs(j) > 1e-9 * mx) s.push_back(j);
  return s;
}

std::mutex g_observer_mutex;
SolutionObserver g_observer;

}  // namespace

Solution make_solution(const SVInstance& inst, const Vector& u, const Vector& v, Status status,
                       const std::string& method) {
  Solution sol;
  sol.u = u / u.norm();
  sol.v = v / v.norm();
  sol.lambda = sol.u.dot(inst.A() * sol.v);
  sol.lower = sol.upper = sol.lambda;
  sol.status = status;
  sol.method = method;
  sol.support_I = support_of(project_cone(inst.P(), sol.u).coeffs);
  sol.support_J = support_of(project_cone(inst.Q(), sol.v).coeffs);
  sol.kkt_residual = kkt_residual(inst, sol.u, sol.v);
  return sol;
}

void set_solution_observer(SolutionObserver obs) {
  std::lock_guard<std::mutex> lock(g_observer_mutex);
  g_observer = std::move(obs);
}

void emit_solution(const Solution& sol) {
  std::lock_guard<std::mutex> lock(g_observer_mutex);
  if (g_observer) g_observer(sol);
}

PreprocessOutcome check_nonnegative_case(const SVInstance& inst, double tol) {
  const Matrix& C = inst.cross();
  PreprocessOutcome out;
  int bi = 0, bj = 0;
  for (int i = 0; i < C.rows(); ++i)
    for (int j = 0; j < C.cols(); ++j)
      if (C(i, j) < C(bi, bj)) {
        bi = i;
        bj = j;
      }
  if (C(bi, bj) < -tol) return out;
  out.kind = PreprocessKind::NonnegativeCase;
  Solution sol = make_solution(inst, inst.P().generators().col(bi), inst.Q().generators().col(bj),
                               Status::ExactGlobal, "nonnegative-case");
  sol.lambda = sol.lower = sol.upper = C(bi, bj);
  out.solution = sol;
  emit_solution(sol);
  return out;
}

PreprocessOutcome check_extreme_case(const SVInstance& inst, ExtremeMode mode,
                                     std::uint64_t seed) {
  const SpectralData& sd = inst.spectral();
  const int m = inst.m();
  const int n = inst.n();
  const Matrix& G = inst.P().generators();
  const Matrix& H = inst.Q().generators();
  const int p = static_cast<int>(G.cols());
  const int q = static_cast<int>(H.cols());

  Matrix stacked(n + m, sd.multiplicity);
  stacked.topRows(n) = sd.V;
  stacked.bottomRows(m) = -sd.U;
  const Matrix W = orth_basis(stacked);

  Matrix B = Matrix::Zero(n + m, q + p);
  B.topLeftCorner(n, q) = H;
  B.bottomRightCorner(m, p) = G;
  const Matrix M = B - W * (W.transpose() * B);
  const double tol = 1e-7 * std::max(spectral_norm(H), spectral_norm(G));

  // z >= 0 with M z = 0 and a'z = s exists iff the augmented NNLS below has
  // zero residual.
  Matrix aug(n + m + 1, q + p);
  aug.topRows(n + m) = M;
  Vector rhs = Vector::Zero(n + m + 1);
  auto attempt = [&](const Vector& a, double s) -> std::optional<Vector> {
    aug.row(n + m) = a.transpose();
    rhs(n + m) = s;
    NnlsResult r = nnls(aug, rhs);
    if (r.residual <= tol) return r.x;
    return std::nullopt;
  };

  std::optional<Vector> z;
  if (mode == ExtremeMode::Deterministic) {
    if (inst.P().pointed() && inst.Q().pointed()) {
      z = attempt(Vector::Ones(q + p), 1.0);
    } else {
      for (int i = 0; i < n + m && !z; ++i)
        for (double s : {1.0, -1.0}) {
          z = attempt(B.row(i).transpose(), s);
          if (z) break;
        }
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Vector pvec(n + m);
    for (int i = 0; i < n + m; ++i) pvec(i) = gauss(rng);
    const Vector a = B.transpose() * pvec;
    z = attempt(a, 1.0);
    if (!z) z = attempt(a, -1.0);
  }

  PreprocessOutcome out;
  if (!z) return out;
  const Vector v = H * z->head(q);
  const Vector u = G * z->tail(p);
  if (!(u.norm() > 1e-12) || !(v.norm() > 1e-12)) return out;
  Solution sol = make_solution(inst, u, v, Status::ExactGlobal, "extreme-case");
  if (std::abs(sol.lambda + inst.norm()) > 1e-7 * std::max(1.0, inst.norm())) return out;
  out.kind = PreprocessKind::ExtremeCase;
  out.solution = sol;
  emit_solution(sol);
  return out;
}

PreprocessOutcome preprocess(const SVInstance& inst) {
  PreprocessOutcome out = check_nonnegative_case(inst);
  if (out.kind != PreprocessKind::None) return out;
  return check_extreme_case(inst);
}

std::pair<Vector, Vector> MAReduction::back_map(const Vector& x, const Vector& y) const {
  Vector a = x.head(m);
  Vector b = lift_q.transpose() * y;
  a /= a.norm();
  b /= b.norm();
  if (transposed) return {b, a};
  return {a, b};
}

MAReduction reduce_to_ma(const SVInstance& inst) {
  const bool transposed = inst.m() < inst.n();
  const Matrix A = transposed ? Matrix(inst.A().transpose()) : inst.A();
  const PolyhedralCone& P = transposed ? inst.Q() : inst.P();
  const PolyhedralCone& Q = transposed ? inst.P() : inst.Q();
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const double s0 = inst.norm();
  const Matrix Ahat = A / s0;
  Matrix S = Matrix::Identity(n, n) - Ahat.transpose() * Ahat;
  S = 0.5 * (S + S.transpose()).eval();
  const Matrix L = psd_cholesky_rank(S);
  const int s = static_cast<int>(L.cols());

  Matrix lift_q(m + s, n);
  lift_q.topRows(m) = Ahat;
  lift_q.bottomRows(s) = L.transpose();
  Matrix Gl = Matrix::Zero(m + s, P.num_generators());
  Gl.topRows(m) = P.generators();
  const Matrix Hl = lift_q * Q.generators();

  PolyhedralCone Pl = make_cone(Gl, "lift(" + P.label() + ")");
  PolyhedralCone Ql = make_cone(Hl, "lift(" + Q.label() + ")");
  MAReduction red{make_ma(Pl, Ql), transposed, s0, m, lift_q};
  return red;
}

int saddle_cardinality_bound(const SVInstance& inst) {
  return inst.m() + inst.n() - inst.spectral().multiplicity;
}

SupportUniverse support_universe(const SVInstance& inst) {
  const Matrix& C = inst.cross();
  const int p = static_cast<int>(C.rows());
  const int q = static_cast<int>(C.cols());
  SupportUniverse uni;
  const bool acute = inst.P().gram().minCoeff() >= -1e-12 && inst.Q().gram().minCoeff() >= -1e-12;
  if (!acute) {
    for (int i = 0; i < p; ++i) uni.rows.push_back(i);
    for (int j = 0; j < q; ++j) uni.cols.push_back(j);
    return uni;
  }
  const double thresh = -1e-13 * std::max(1.0, C.cwiseAbs().maxCoeff());
  std::vector<char> row(p, 1), col(q, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < p; ++i) {
      if (!row[i]) continue;
      bool neg = false;
      for (int j = 0; j < q && !neg; ++j) neg = col[j] && C(i, j) < thresh;
      if (!neg) {
        row[i] = 0;
        changed = true;
      }
    }
    for (int j = 0; j < q; ++j) {
      if (!col[j]) continue;
      bool neg = false;
      for (int i = 0; i < p && !neg; ++i) neg = row[i] && C(i, j) < thresh;
      if (!neg) {
        col[j] = 0;
        changed = true;
      }
    }
  }
  for (int i = 0; i < p; ++i)
    if (row[i]) uni.rows.push_back(i);
  for (int j = 0; j < q; ++j)
    if (col[j]) uni.cols.push_back(j);
  return uni;
}

}  // namespace conesv
