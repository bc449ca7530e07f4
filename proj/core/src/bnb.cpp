#include "conesv/bnb.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <queue>

#include "conesv/bfas.hpp"

namespace conesv {

namespace {

using Clock = std::chrono::steady_clock;

constexpr size_t kMaxRecordedCuts = 100000;

struct Term {
  int a, b;  // x index, y index (reduced)
  double coef;
};

struct Node {
  Vector lx, ux, ly, uy;
  std::vector<Vector> xcuts, ycuts;  // ball cuts found along the path
  double key = 0.0;  // bound inherited from the parent
  int depth = 0;
  long long id = 0;
};

struct NodeOrder {
  bool operator()(const Node& l, const Node& r) const {
    if (l.key != r.key) return l.key > r.key;
    if (l.depth != r.depth) return l.depth < r.depth;
    return l.id > r.id;
  }
};

struct Incumbent {
  double value = kInf;
  Vector u, v;
};

std::vector<int> coeff_support(const Vector& c) {
  std::vector<int> s;
  const double mx = c.maxCoeff();
  for (int j = 0; j < c.size(); ++j)
    if (c(j) > 1e-8 * mx) s.push_back(j);
  return s;
}

// Replaces an approximate critical pair by the exact one on its support,
// when that is feasible and no worse.
void refine(const SVInstance& inst, Incumbent& inc) {
  const std::vector<int> I = coeff_support(project_cone(inst.P(), inc.u).coeffs);
  const std::vector<int> J = coeff_support(project_cone(inst.Q(), inc.v).coeffs);
  if (I.empty() || J.empty()) return;
  if (I.size() == 1 && J.size() == 1) {
    const Vector u = inst.P().generators().col(I[0]);
    const Vector v = inst.Q().generators().col(J[0]);
    const double val = u.dot(inst.A() * v);
    if (val <= inc.value + 1e-9 * std::max(1.0, std::abs(inc.value))) inc = {val, u, v};
    return;
  }
  const SupportEval ev = eval_support_pair(inst, I, J);
  if (ev.feasible && ev.value <= inc.value + 1e-9 * std::max(1.0, std::abs(inc.value)))
    inc = {ev.value, ev.u, ev.v};
}

}  // namespace

namespace {

// Outer cutting-plane estimate of max x_i over {x >= 0, ||G x|| <= 1},
// starting from the box LP; every iterate is a valid upper bound.
Vector ball_bounds(const Matrix& G, const Vector& box) {
  const int m = static_cast<int>(G.rows());
  const int p = static_cast<int>(G.cols());
  Vector out = box;
  for (int i = 0; i < p; ++i) {
    std::vector<Vector> cuts;
    for (int round = 0; round < 60; ++round) {
      Matrix Aub(2 * m + static_cast<int>(cuts.size()), p);
      Vector b = Vector::Ones(Aub.rows());
      Aub.topRows(m) = G;
      Aub.middleRows(m, m) = -G;
      for (size_t k = 0; k < cuts.size(); ++k) Aub.row(2 * m + k) = cuts[k].transpose();
      Vector c = Vector::Zero(p);
      c(i) = -1.0;
      LpResult lp = lp_solve(c, Aub, b, Vector::Zero(p), box);
      if (lp.status != LpStatus::Optimal) break;
      out(i) = std::min(out(i), -lp.objective);
      const Vector gx = G * lp.x;
      const double nrm = gx.norm();
      if (nrm <= 1.0 + 1e-7) break;
      cuts.push_back(G.transpose() * (gx / nrm));
    }
  }
  return out;
}

}  // namespace

Vector variable_bounds(const Matrix& G) {
  const int m = static_cast<int>(G.rows());
  const int p = static_cast<int>(G.cols());
  Matrix Aub(2 * m, p);
  Aub.topRows(m) = G;
  Aub.bottomRows(m) = -G;
  const Vector b = Vector::Ones(2 * m);
  Vector out(p);
  for (int i = 0; i < p; ++i) {
    Vector c = Vector::Zero(p);
    c(i) = -1.0;
    LpResult lp = lp_solve(c, Aub, b, Vector::Zero(p), Vector::Constant(p, kInf));
    if (lp.status == LpStatus::Unbounded)
      throw Error(ErrorCode::NotPointed, "variable_bounds: cone is not pointed");
    if (lp.status != LpStatus::Optimal)
      throw Error(ErrorCode::NumericalFailure, "variable_bounds: LP failed");
    out(i) = -lp.objective;
  }
  return out;
}

std::array<Plane, 4> mccormick_planes(double lx, double ux, double ly, double uy) {
  return {{
      {ly, lx, -1.0, lx * ly},
      {uy, ux, -1.0, ux * uy},
      {-uy, -lx, 1.0, -lx * uy},
      {-ly, -ux, 1.0, -ux * ly},
  }};
}

BnbResult solve_bnb_detailed(const SVInstance& inst, const BnbConfig& cfg) {
  const auto t0 = Clock::now();
  auto elapsed = [&]() { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  if (!inst.P().pointed() || !inst.Q().pointed())
    throw Error(ErrorCode::NotPointed, "solve_bnb: both cones must be pointed");
  // With G^T A H >= 0 the optimum is its smallest entry and the relaxed ball
  // constraints stop being tight; preprocessing answers that case.
  if (inst.cross().minCoeff() >= 0.0)
    throw Error(ErrorCode::InvalidInput,
                "solve_bnb: G^T A H has no negative entry; run preprocessing");

  const Matrix& C = inst.cross();
  const SupportUniverse uni = support_universe(inst);
  BnbResult result;

  // Incumbent from the warm start or a short multistart.
  Incumbent inc;
  const PolyhedralCone P = inst.P();
  const PolyhedralCone Q = inst.Q();
  const ConeOracle oP = polyhedral_oracle(P);
  const ConeOracle oQ = polyhedral_oracle(Q);
  auto consider = [&](const Vector& u, const Vector& v) {
    const double val = u.dot(inst.A() * v);
    if (val < inc.value) inc = {val, u, v};
  };
  {
    int si = 0, sj = 0;
    for (int i = 0; i < C.rows(); ++i)
      for (int j = 0; j < C.cols(); ++j)
        if (C(i, j) < C(si, sj)) {
          si = i;
          sj = j;
        }
    consider(P.generators().col(si), Q.generators().col(sj));
  }
  if (cfg.warm_start) {
    consider(cfg.warm_start->first / cfg.warm_start->first.norm(),
             cfg.warm_start->second / cfg.warm_start->second.norm());
  } else if (cfg.root_restarts > 0) {
    MultistartConfig ms;
    ms.restarts = cfg.root_restarts;
    ms.seed = cfg.seed;
    ms.params = cfg.polish;
    MultistartResult r = multistart_eao(
        inst.A(), [&P]() { return polyhedral_oracle(P); }, [&Q]() { return polyhedral_oracle(Q); },
        ms);
    consider(r.best.u, r.best.v);
  }
  refine(inst, inc);

  const int p = static_cast<int>(uni.rows.size());
  const int q = static_cast<int>(uni.cols.size());
  auto finish = [&](Status status, double lower) {
    Solution sol = make_solution(inst, inc.u, inc.v, status, "bnb");
    sol.lambda = inc.value;
    sol.upper = inc.value;
    sol.lower = status == Status::ExactGlobal ? inc.value : std::min(lower, inc.value);
    sol.work = result.nodes;
    sol.wall_time = elapsed();
    result.solution = sol;
    result.lower = std::min(lower, inc.value);
    emit_solution(sol);
    return result;
  };
  if (p == 0 || q == 0) return finish(Status::ExactGlobal, inc.value);

  Matrix G(inst.m(), p), H(inst.n(), q);
  for (int a = 0; a < p; ++a) G.col(a) = P.generators().col(uni.rows[a]);
  for (int b = 0; b < q; ++b) H.col(b) = Q.generators().col(uni.cols[b]);
  std::vector<Term> terms;
  const double cscale = C.cwiseAbs().maxCoeff();
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < q; ++b) {
      const double c = C(uni.rows[a], uni.cols[b]);
      if (std::abs(c) > 1e-14 * cscale) terms.push_back({a, b, c});
    }
  const int T = static_cast<int>(terms.size());
  const int N = p + q + T;

  // Supporting planes of the balls at the generator directions, shared by all nodes.
  std::vector<Vector> base_xcuts, base_ycuts;
  const Matrix GG = G.transpose() * G;
  const Matrix HH = H.transpose() * H;
  for (int a = 0; a < p; ++a) base_xcuts.push_back(GG.row(a).transpose());
  for (int b = 0; b < q; ++b) base_ycuts.push_back(HH.row(b).transpose());
  const size_t max_path_cuts = static_cast<size_t>(2 * (p + q) + 8);

  Node root;
  root.lx = Vector::Zero(p);
  root.ux = ball_bounds(G, variable_bounds(G));
  root.ly = Vector::Zero(q);
  root.uy = ball_bounds(H, variable_bounds(H));
  // Raw LP bounds order the queue; -||A|| is only a floor for reporting,
  // clamping keys to it would tie every early node.
  const double floor_bound = -inst.norm();
  root.key = -kInf;

  Vector cost = Vector::Zero(N);
  for (int t = 0; t < T; ++t) cost(p + q + t) = terms[t].coef;

  struct NodeLp {
    bool solved = false;
    bool infeasible = false;
    double bound = 0.0;
    Vector x, y, w;
  };

  auto solve_node = [&](Node& nd) {
    NodeLp out;
    Vector lo(N), hi(N);
    lo << nd.lx, nd.ly, Vector::Zero(T);
    hi << nd.ux, nd.uy, Vector::Zero(T);
    for (int t = 0; t < T; ++t) {
      lo(p + q + t) = nd.lx(terms[t].a) * nd.ly(terms[t].b);
      hi(p + q + t) = nd.ux(terms[t].a) * nd.uy(terms[t].b);
    }
    for (int round = 0; round <= cfg.max_cut_rounds; ++round) {
      const int rows = 2 * T + static_cast<int>(base_xcuts.size() + base_ycuts.size() +
                                                nd.xcuts.size() + nd.ycuts.size());
      Matrix Aub = Matrix::Zero(rows, N);
      Vector bub(rows);
      int r = 0;
      for (int t = 0; t < T; ++t) {
        const Term& tm = terms[t];
        const auto planes = mccormick_planes(nd.lx(tm.a), nd.ux(tm.a), nd.ly(tm.b), nd.uy(tm.b));
        // Minimization only ever presses w against the lower envelopes when
        // the coefficient is positive, and the upper ones when negative.
        const int first = tm.coef > 0.0 ? 0 : 2;
        for (int k = first; k < first + 2; ++k) {
          const Plane& pl = planes[k];
          Aub(r, tm.a) = pl.a;
          Aub(r, p + tm.b) = pl.b;
          Aub(r, p + q + t) = pl.c;
          bub(r) = pl.d;
          ++r;
        }
      }
      for (const auto* pool : {&base_xcuts, &nd.xcuts})
        for (const Vector& cut : *pool) {
          Aub.row(r).head(p) = cut.transpose();
          bub(r++) = 1.0;
        }
      for (const auto* pool : {&base_ycuts, &nd.ycuts})
        for (const Vector& cut : *pool) {
          Aub.row(r).segment(p, q) = cut.transpose();
          bub(r++) = 1.0;
        }
      LpResult lp;
      try {
        lp = lp_solve(cost, Aub, bub, lo, hi);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NumericalFailure) throw;
        ++result.lp_failures;
        return out;
      }
      if (lp.status == LpStatus::Infeasible) {
        out.infeasible = true;
        return out;
      }
      if (lp.status != LpStatus::Optimal) {
        ++result.lp_failures;
        return out;
      }
      out.solved = true;
      out.bound = lp.objective;
      out.x = lp.x.head(p);
      out.y = lp.x.segment(p, q);
      out.w = lp.x.tail(T);
      if (round == cfg.max_cut_rounds) break;
      bool added = false;
      const Vector gx = G * out.x;
      if (gx.norm() > 1.0 + 1e-8) {
        nd.xcuts.push_back(G.transpose() * (gx / gx.norm()));
        if (cfg.record_log && result.cuts_u.size() < kMaxRecordedCuts)
          result.cuts_u.push_back(gx / gx.norm());
        added = true;
      }
      const Vector hy = H * out.y;
      if (hy.norm() > 1.0 + 1e-8) {
        nd.ycuts.push_back(H.transpose() * (hy / hy.norm()));
        if (cfg.record_log && result.cuts_v.size() < kMaxRecordedCuts)
          result.cuts_v.push_back(hy / hy.norm());
        added = true;
      }
      if (!added) break;
    }
    return out;
  };

  auto gap_abs = [&]() { return cfg.gap_tol * std::max(1.0, std::abs(inc.value)); };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(root);
  long long next_id = 1;
  double global_lower = floor_bound;
  bool limit_hit = false;

  while (!open.empty()) {
    Node nd = open.top();
    if (nd.key >= inc.value - gap_abs()) break;
    if (elapsed() > cfg.time_limit || result.nodes >= cfg.max_nodes) {
      limit_hit = true;
      break;
    }
    open.pop();
    global_lower = std::max(global_lower, nd.key);
    ++result.nodes;

    NodeLp lp = solve_node(nd);
    double bound = nd.key;
    if (lp.infeasible) {
      bound = kInf;
    } else if (lp.solved) {
      bound = std::max(nd.key, lp.bound);
      const Vector gx = G * lp.x;
      const Vector hy = H * lp.y;
      if (gx.norm() > 1e-12 && hy.norm() > 1e-12) {
        const Vector u = gx / gx.norm();
        const Vector v = hy / hy.norm();
        const double before = inc.value;
        consider(u, v);
        const double witness = u.dot(inst.A() * v);
        if (nd.depth <= 2 || witness < before + 1e-3 * std::max(1.0, std::abs(before))) {
          EaoRun pol = eao_run(inst.A(), oP, oQ, v, cfg.polish);
          consider(pol.u, pol.v);
        }
        if (inc.value < before) refine(inst, inc);
      }
    }
    if (cfg.record_log)
      result.log.push_back({result.nodes, std::max(bound, floor_bound), inc.value, global_lower,
                            nd.depth, elapsed()});
    if (bound >= inc.value - gap_abs()) continue;

    // Branching variable: worst bilinear gap at the witness, else the widest box side.
    int var = -1;
    double split = 0.0;
    if (lp.solved) {
      double worst = 1e-12;
      int tsel = -1;
      for (int t = 0; t < T; ++t) {
        const double gap = std::abs(lp.w(t) - lp.x(terms[t].a) * lp.y(terms[t].b));
        if (gap > worst) {
          worst = gap;
          tsel = t;
        }
      }
      if (tsel >= 0) {
        const int a = terms[tsel].a, b = terms[tsel].b;
        const double wx = nd.ux(a) - nd.lx(a);
        const double wy = nd.uy(b) - nd.ly(b);
        if (wx >= wy) {
          var = a;
          split = std::clamp(lp.x(a), nd.lx(a) + 0.3 * wx, nd.lx(a) + 0.7 * wx);
        } else {
          var = p + b;
          split = std::clamp(lp.y(b), nd.ly(b) + 0.3 * wy, nd.ly(b) + 0.7 * wy);
        }
      }
    }
    if (var < 0) {
      double widest = -1.0;
      for (int a = 0; a < p; ++a)
        if (nd.ux(a) - nd.lx(a) > widest) {
          widest = nd.ux(a) - nd.lx(a);
          var = a;
        }
      for (int b = 0; b < q; ++b)
        if (nd.uy(b) - nd.ly(b) > widest) {
          widest = nd.uy(b) - nd.ly(b);
          var = p + b;
        }
      split = var < p ? 0.5 * (nd.lx(var) + nd.ux(var)) : 0.5 * (nd.ly(var - p) + nd.uy(var - p));
    }
    for (auto* pool : {&nd.xcuts, &nd.ycuts})
      if (pool->size() > max_path_cuts) pool->erase(pool->begin(), pool->end() - max_path_cuts);
    Node left = nd, right = nd;
    left.key = right.key = bound;
    left.depth = right.depth = nd.depth + 1;
    if (var < p) {
      left.ux(var) = split;
      right.lx(var) = split;
    } else {
      left.uy(var - p) = split;
      right.ly(var - p) = split;
    }
    left.id = next_id++;
    right.id = next_id++;
    open.push(std::move(left));
    open.push(std::move(right));
  }

  double lower = inc.value;
  if (!open.empty()) lower = std::min(inc.value, open.top().key);
  lower = std::max(lower, global_lower);
  if (limit_hit) return finish(Status::BoundPair, std::min(lower, inc.value));
  return finish(Status::ExactGlobal, lower);
}

Solution solve_bnb(const SVInstance& inst, const BnbConfig& cfg) {
  return solve_bnb_detailed(inst, cfg).solution;
}

void write_node_log(std::ostream& os, const std::vector<BnbNodeLog>& log) {
  os << "node,bound,incumbent,global_lower,depth,time\n";
  os << std::setprecision(17);
  for (const BnbNodeLog& r : log)
    os << r.node << ',' << r.bound << ',' << r.incumbent << ',' << r.global_lower << ','
       << r.depth << ',' << r.time << '\n';
}

}  // namespace conesv
