#include "conesv/bfas.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_set>

namespace conesv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix take_cols(const Matrix& M, const std::vector<int>& idx) {
  Matrix out(M.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out.col(k) = M.col(idx[k]);
  return out;
}

// Thin SVD pieces of a generator block: M = U S V^T.
struct BlockSvd {
  Matrix U, V;
  Vector s;
  bool full_rank = false;

  explicit BlockSvd(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s = svd.singularValues();
    U = svd.matrixU();
    V = svd.matrixV();
    full_rank = M.cols() <= M.rows() && s(s.size() - 1) > kDefaultRankTol * s(0);
  }
  // (M^T M)^{-1/2} X
  Matrix inv_sqrt_gram(const Matrix& X) const {
    return V * (s.cwiseInverse().asDiagonal() * (V.transpose() * X));
  }
  // M^+ X
  Matrix pinv(const Matrix& X) const {
    return V * (s.cwiseInverse().asDiagonal() * (U.transpose() * X));
  }
};

}  // namespace

std::optional<Vector> feasibility_check(const Matrix& V) {
  const int d = static_cast<int>(V.rows());
  Matrix aug(d + 1, d);
  aug.topRows(d) = V * V.transpose() - Matrix::Identity(d, d);
  aug.row(d).setOnes();
  Vector rhs = Vector::Zero(d + 1);
  rhs(d) = 1.0;
  NnlsResult r = nnls(aug, rhs);
  if (r.residual > 1e-7) return std::nullopt;
  const double s = r.x.sum();
  if (!(s > 0.0)) return std::nullopt;
  return Vector(r.x / s);
}

SupportEval eval_support_pair(const SVInstance& inst, const std::vector<int>& I,
                              const std::vector<int>& J, double prune_above) {
  SupportEval out;
  const Matrix Gb = take_cols(inst.P().generators(), I);
  const Matrix Hb = take_cols(inst.Q().generators(), J);
  const BlockSvd sg(Gb);
  if (!sg.full_rank) return out;
  const BlockSvd sh(Hb);
  if (!sh.full_rank) return out;
  out.full_rank = true;

  const Matrix& A = inst.A();
  // Symmetrized restricted operator: B = (Gb'Gb)^{-1/2} Gb' A Hb (Hb'Hb)^{-1/2}.
  const Matrix B = sg.inv_sqrt_gram(Gb.transpose() * A * Hb) *
                   sh.V * sh.s.cwiseInverse().asDiagonal() * sh.V.transpose();
  const int k = static_cast<int>(I.size());
  const int l = static_cast<int>(J.size());
  const bool x_side = k <= l;
  Matrix BB = x_side ? Matrix(B * B.transpose()) : Matrix(B.transpose() * B);
  BB = 0.5 * (BB + BB.transpose()).eval();
  const SymEig eig = sym_eig(BB);
  const int dim = static_cast<int>(BB.rows());
  const double rho = eig.values(dim - 1);
  out.mu = -std::sqrt(std::max(rho, 0.0));
  if (out.mu > prune_above || !(rho > 0.0)) {
    out.pruned = true;
    return out;
  }
  int mult = 0;
  while (mult < dim && eig.values(dim - 1 - mult) >= rho - 1e-9 * rho) ++mult;
  const Matrix Ue = eig.vectors.rightCols(mult);

  Matrix X, Y;
  if (x_side) {
    X = sg.inv_sqrt_gram(Ue);
    Y = sh.pinv(A.transpose() * (Gb * X)) / out.mu;
  } else {
    Y = sh.inv_sqrt_gram(Ue);
    X = sg.pinv(A * (Hb * Y)) / out.mu;
  }
  Matrix W(l + k, mult);
  W.topRows(l) = Y;
  W.bottomRows(k) = X;

  Vector w;
  if (mult == 1) {
    w = W.col(0);
    const double scale = w.cwiseAbs().maxCoeff();
    if (w.minCoeff() >= -1e-10 * scale) {
      // already nonnegative
    } else if (w.maxCoeff() <= 1e-10 * scale) {
      w = -w;
    } else {
      return out;
    }
  } else {
    const Matrix Vb = orth_basis(W);
    std::optional<Vector> z = feasibility_check(Vb);
    if (!z) return out;
    w = Vb * (Vb.transpose() * *z);
  }
  w = w.cwiseMax(0.0);
  const Vector u = Gb * w.tail(k);
  const Vector v = Hb * w.head(l);
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) return out;
  out.feasible = true;
  out.u = u / nu;
  out.v = v / nv;
  out.value = out.u.dot(A * out.v);
  return out;
}

namespace {

// Support pairs (I, J) over the given universes, ordered by |I| + |J| (up or
// down), then |I|, then lexicographically in I and J.
class PairEnumerator {
 public:
  PairEnumerator(std::vector<int> rows, std::vector<int> cols, int cmin, int cmax, bool descending)
      : rows_(std::move(rows)), cols_(std::move(cols)), cmin_(cmin), cmax_(cmax),
        descending_(descending) {
    c_ = descending_ ? cmax_ : cmin_;
    done_ = !start_level();
  }

  // Returns false when exhausted.
  bool next(std::vector<int>& I, std::vector<int>& J, long long& index) {
    if (done_) return false;
    I.resize(a_);
    J.resize(b_);
    for (int t = 0; t < a_; ++t) I[t] = rows_[ci_[t]];
    for (int t = 0; t < b_; ++t) J[t] = cols_[cj_[t]];
    index = counter_++;
    advance();
    return true;
  }

  int level() const { return c_; }

 private:
  static bool next_comb(std::vector<int>& c, int n) {
    const int k = static_cast<int>(c.size());
    int t = k - 1;
    while (t >= 0 && c[t] == n - k + t) --t;
    if (t < 0) return false;
    ++c[t];
    for (int s = t + 1; s < k; ++s) c[s] = c[s - 1] + 1;
    return true;
  }

  static void first_comb(std::vector<int>& c, int k) {
    c.resize(k);
    for (int t = 0; t < k; ++t) c[t] = t;
  }

  bool in_range(int c) const { return c >= cmin_ && c <= cmax_; }

  // Positions (c_, a_) on the first valid split at or after the current one.
  bool start_level() {
    const int p = static_cast<int>(rows_.size());
    const int q = static_cast<int>(cols_.size());
    while (in_range(c_)) {
      a_ = std::max(1, c_ - q);
      const int amax = std::min(p, c_ - 1);
      if (a_ <= amax) {
        b_ = c_ - a_;
        first_comb(ci_, a_);
        first_comb(cj_, b_);
        return true;
      }
      c_ += descending_ ? -1 : 1;
    }
    return false;
  }

  void advance() {
    const int p = static_cast<int>(rows_.size());
    const int q = static_cast<int>(cols_.size());
    if (next_comb(cj_, q)) return;
    first_comb(cj_, b_);
    if (next_comb(ci_, p)) return;
    const int amax = std::min(p, c_ - 1);
    if (a_ < amax) {
      ++a_;
      b_ = c_ - a_;
      first_comb(ci_, a_);
      first_comb(cj_, b_);
      return;
    }
    c_ += descending_ ? -1 : 1;
    done_ = !start_level();
  }

  std::vector<int> rows_, cols_;
  int cmin_, cmax_;
  bool descending_;
  int c_ = 0, a_ = 0, b_ = 0;
  std::vector<int> ci_, cj_;
  long long counter_ = 0;
  bool done_ = false;
};

struct Best {
  double lambda;
  long long index;  // -1 for the generator-pair seed
  Vector u, v;
};

// Pairs whose rows each meet a negative entry of C in J and vice versa.
// Only meaningful when the universe came from the acute reduction.
bool sign_admissible(const Matrix& C, const std::vector<int>& I, const std::vector<int>& J,
                     double thresh) {
  for (int i : I) {
    bool neg = false;
    for (int j : J)
      if (C(i, j) < thresh) {
        neg = true;
        break;
      }
    if (!neg) return false;
  }
  for (int j : J) {
    bool neg = false;
    for (int i : I)
      if (C(i, j) < thresh) {
        neg = true;
        break;
      }
    if (!neg) return false;
  }
  return true;
}

std::uint64_t mask_of(const std::vector<int>& idx) {
  std::uint64_t m = 0;
  for (int i : idx) m |= std::uint64_t{1} << i;
  return m;
}

struct MaskPairHash {
  size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    return std::hash<std::uint64_t>()(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
  }
};

}  // namespace

Solution solve_bfas(const SVInstance& inst, const BfasConfig& cfg) {
  const auto t0 = Clock::now();
  const Matrix& C = inst.cross();
  int si = 0, sj = 0;
  for (int i = 0; i < C.rows(); ++i)
    for (int j = 0; j < C.cols(); ++j)
      if (C(i, j) < C(si, sj)) {
        si = i;
        sj = j;
      }
  if (!(C(si, sj) < 0.0))
    throw Error(ErrorCode::InvalidInput,
                "solve_bfas: G^T A H has no negative entry; the smallest entry is the optimum");

  Best best{C(si, sj), -1, inst.P().generators().col(si), inst.Q().generators().col(sj)};
  const SupportUniverse uni = support_universe(inst);
  const bool acute = inst.P().gram().minCoeff() >= -1e-12 && inst.Q().gram().minCoeff() >= -1e-12;
  const double neg_thresh = -1e-13 * std::max(1.0, C.cwiseAbs().maxCoeff());
  const int cmax = std::min(saddle_cardinality_bound(inst),
                            static_cast<int>(uni.rows.size() + uni.cols.size()));
  const bool subset = cfg.subset_prune && uni.rows.size() <= 64 && uni.cols.size() <= 64;
  PairEnumerator gen(uni.rows, uni.cols, 3, cmax, subset);

  // Candidates are ordered by value, ties (within 1e-12) by enumeration
  // index, which keeps the result independent of the thread schedule.
  constexpr double kTie = 1e-12;
  constexpr double kPruneMargin = 1e-10;
  std::mutex mu;
  std::atomic<double> live(best.lambda);
  std::atomic<bool> timed_out(false);
  std::atomic<long long> evaluated(0);
  long long next_report = cfg.progress_every;

  auto offer = [&](double value, long long index, const Vector& u, const Vector& v) {
    std::lock_guard<std::mutex> lock(mu);
    const bool better = value < best.lambda - kTie ||
                        (value <= best.lambda + kTie && index < best.index && index >= 0 &&
                         best.index >= 0);
    if (better) {
      best = {value, index, u, v};
      if (value < live.load()) live.store(value);
    }
  };

  auto evaluate = [&](const std::vector<int>& I, const std::vector<int>& J, long long index,
                      bool* dominating) {
    const SupportEval ev = eval_support_pair(inst, I, J, live.load() + kPruneMargin);
    if (dominating) *dominating = ev.full_rank && (ev.pruned || ev.feasible);
    if (!ev.feasible) return;
    if (kkt_residual(inst, ev.u, ev.v) > kExactKktTol) return;
    offer(ev.value, index, ev.u, ev.v);
  };

  auto check_time = [&]() {
    if (std::isfinite(cfg.time_limit) && seconds_since(t0) > cfg.time_limit) timed_out = true;
  };

  auto report = [&](int level) {
    if (!cfg.progress) return;
    const long long done = evaluated.load();
    if (done < next_report) return;
    next_report = done + cfg.progress_every;
    cfg.progress({done, level, live.load(), seconds_since(t0)});
  };

  if (subset) {
    using Key = std::pair<std::uint64_t, std::uint64_t>;
    std::unordered_set<Key, MaskPairHash> upper, current;
    int level = gen.level();
    std::vector<int> I, J;
    long long index = 0;
    while (!timed_out && gen.next(I, J, index)) {
      const int cur = static_cast<int>(I.size() + J.size());
      if (cur != level) {
        upper.swap(current);
        current.clear();
        level = cur;
      }
      const std::uint64_t mi = mask_of(I), mj = mask_of(J);
      bool dominated = false;
      for (int r : uni.rows)
        if (!(mi >> r & 1) && upper.count({mi | std::uint64_t{1} << r, mj})) {
          dominated = true;
          break;
        }
      if (!dominated)
        for (int c : uni.cols)
          if (!(mj >> c & 1) && upper.count({mi, mj | std::uint64_t{1} << c})) {
            dominated = true;
            break;
          }
      if (dominated) {
        current.insert({mi, mj});
      } else if (!acute || sign_admissible(C, I, J, neg_thresh)) {
        bool dom = false;
        evaluate(I, J, index, &dom);
        if (dom) current.insert({mi, mj});
      }
      ++evaluated;
      if ((evaluated & 255) == 0) check_time();
      report(level);
    }
  } else {
    const int threads = std::max(1, cfg.threads);
    std::mutex gen_mu;
    auto worker = [&]() {
      std::vector<std::vector<int>> Is, Js;
      std::vector<long long> idx;
      while (!timed_out) {
        Is.clear();
        Js.clear();
        idx.clear();
        int level = 0;
        {
          std::lock_guard<std::mutex> lock(gen_mu);
          std::vector<int> I, J;
          long long index;
          for (int t = 0; t < 64 && gen.next(I, J, index); ++t) {
            Is.push_back(I);
            Js.push_back(J);
            idx.push_back(index);
          }
          level = gen.level();
        }
        if (idx.empty()) return;
        for (size_t t = 0; t < idx.size(); ++t) {
          if (!acute || sign_admissible(C, Is[t], Js[t], neg_thresh))
            evaluate(Is[t], Js[t], idx[t], nullptr);
        }
        evaluated += static_cast<long long>(idx.size());
        check_time();
        if (cfg.progress) {
          std::lock_guard<std::mutex> lock(gen_mu);
          report(level);
        }
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
  }

  Solution sol = make_solution(inst, best.u, best.v,
                               timed_out ? Status::BoundPair : Status::ExactGlobal, "bfas");
  if (best.index < 0) sol.lambda = best.lambda;
  if (timed_out) {
    sol.lower = -inst.norm();
    sol.upper = sol.lambda;
  } else {
    sol.lower = sol.upper = sol.lambda;
  }
  sol.work = evaluated.load();
  sol.wall_time = seconds_since(t0);
  emit_solution(sol);
  return sol;
}

}  // namespace conesv
