#include "conesv/srpl.hpp"

#include "conesv/bfas.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace conesv {

namespace {
using Clock = std::chrono::steady_clock;

Vector vertex_at_min(const Vector& c) {
  Eigen::Index j = 0;
  c.minCoeff(&j);
  Vector e = Vector::Zero(c.size());
  e(j) = 1.0;
  return e;
}

Vector dirichlet_uniform(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> expo(1.0);
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = expo(rng);
  return x / x.sum();
}

std::vector<int> simplex_support(const Vector& x, double rel) {
  std::vector<int> s;
  const double mx = x.maxCoeff();
  for (int j = 0; j < x.size(); ++j)
    if (x(j) > rel * mx) s.push_back(j);
  return s;
}

// The stopping test bounds a quadratic stationarity measure, so a converged
// run sits about sqrt(delta * mu) away from a critical pair, sometimes with
// coordinates still decaying toward zero. Swap in the exact critical pair on
// the run's support (tried at a few cutoffs for "zero") when it is no worse
// and closer to stationarity.
void refine_on_support(const SVInstance& inst, SrplRun& run) {
  const double kkt0 = kkt_residual(inst, run.u, run.v);
  for (double rel : {1e-8, 1e-5, 1e-3}) {
    const std::vector<int> I = simplex_support(run.x, rel);
    const std::vector<int> J = simplex_support(run.y, rel);
    Vector u, v;
    if (I.size() == 1 && J.size() == 1) {
      u = inst.P().generators().col(I[0]);
      v = inst.Q().generators().col(J[0]);
    } else {
      const SupportEval ev = eval_support_pair(inst, I, J);
      if (!ev.feasible) continue;
      u = ev.u;
      v = ev.v;
    }
    const double value = u.dot(inst.A() * v);
    if (value > run.value + 1e-9 * std::max(1.0, std::abs(run.value))) continue;
    if (kkt_residual(inst, u, v) >= kkt0) continue;
    const Vector x = project_cone(inst.P(), u).coeffs;
    const Vector y = project_cone(inst.Q(), v).coeffs;
    run.x = x / x.sum();
    run.y = y / y.sum();
    run.u = u;
    run.v = v;
    run.value = value;
    return;
  }
}

// Both sides of the linearization from shared products.
struct Linearized {
  double phi;
  Vector c1, c2;
};

Linearized linearize(const SVInstance& inst, const Vector& x, const Vector& y,
                     const double* delta) {
  const Matrix& G = inst.P().generators();
  const Matrix& H = inst.Q().generators();
  const Vector Gx = G * x;
  const Vector Hy = H * y;
  const double nu = Gx.norm();
  const double nv = Hy.norm();
  if (!(nu > 0.0) || !(nv > 0.0))
    throw Error(ErrorCode::NonPointedDegeneracy, "srpl: G x or H y vanished");
  const Vector AHy = inst.A() * Hy;
  const Vector AtGx = inst.A().transpose() * Gx;
  Linearized out;
  out.phi = delta ? *delta : Gx.dot(AHy) / (nu * nv);
  out.c1 = G.transpose() * (AHy - out.phi * (nv / nu) * Gx);
  out.c2 = H.transpose() * (AtGx - out.phi * (nu / nv) * Hy);
  return out;
}
}  // namespace

SrplParams srpl_preset(SrplPreset preset) {
  SrplParams p;
  switch (preset) {
    case SrplPreset::SchurOrthant: p.mu1 = 0.25; p.mu2 = 0.01; break;
    case SrplPreset::SchurSchur: p.mu1 = 1.0; p.mu2 = 1.0; break;
    case SrplPreset::CirculantPsv: p.mu1 = 0.25; p.mu2 = 0.01; break;
    case SrplPreset::MatrixCone: p.mu1 = 0.1; p.mu2 = 5.0; break;
  }
  return p;
}

double srpl_objective(const SVInstance& inst, const Vector& x, const Vector& y) {
  const Vector Gx = inst.P().generators() * x;
  const Vector Hy = inst.Q().generators() * y;
  return Gx.dot(inst.A() * Hy) / (Gx.norm() * Hy.norm());
}

Vector srpl_linearization(const SVInstance& inst, const Vector& x, const Vector& y,
                          double delta, int which) {
  if (which != 1 && which != 2) throw Error(ErrorCode::InvalidInput, "srpl_linearization: side");
  const Linearized lin = linearize(inst, x, y, &delta);
  return which == 1 ? lin.c1 : lin.c2;
}

SrplRun srpl_run(const SVInstance& inst, const Vector& x0, const Vector& y0,
                 const SrplParams& prm, bool record_trace) {
  if (!inst.P().pointed() || !inst.Q().pointed())
    throw Error(ErrorCode::NotPointed, "srpl_run: both cones must be pointed");
  const Matrix& G = inst.P().generators();
  const Matrix& H = inst.Q().generators();
  const Matrix& A = inst.A();
  if (x0.size() != G.cols() || y0.size() != H.cols())
    throw Error(ErrorCode::InvalidInput, "srpl_run: starting point has wrong length");
  if (x0.minCoeff() < -1e-12 || y0.minCoeff() < -1e-12 || std::abs(x0.sum() - 1.0) > 1e-9 ||
      std::abs(y0.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidInput, "srpl_run: starting point is not on the simplex");

  const int max_backtracks =
      static_cast<int>(std::floor(60.0 * std::log(2.0) / std::log(1.0 / prm.rho)));
  SrplRun run;
  Vector x = x0, y = y0;
  int k = 0;
  while (true) {
    const Linearized lin = linearize(inst, x, y, nullptr);
    const double phi = lin.phi;
    const Vector& c1 = lin.c1;
    const Vector& c2 = lin.c2;
    const double nu = (G * x).norm();
    const double nv = (H * y).norm();
    const Vector xt = prm.mu1 > 0.0 ? project_simplex(x - c1 / prm.mu1) : vertex_at_min(c1);
    const Vector yt = prm.mu2 > 0.0 ? project_simplex(y - c2 / prm.mu2) : vertex_at_min(c2);
    const Vector d1 = xt - x;
    const Vector d2 = yt - y;
    const double l1 = c1.dot(d1);
    const double l2 = c2.dot(d2);
    if (std::abs(l1) < prm.delta && std::abs(l2) < prm.delta) {
      run.converged = true;
      break;
    }
    if (k >= prm.max_iter) break;

    double t = prm.beta;
    bool accepted = false;
    Vector xn, yn;
    double phin = 0.0, required = 0.0;
    for (int l = 0; l <= max_backtracks; ++l) {
      xn = x + t * d1;
      yn = y + t * d2;
      phin = srpl_objective(inst, xn, yn);
      required = prm.alpha * t * (l1 + l2) / (nu * nv);
      if (phin <= phi + required) {
        accepted = true;
        break;
      }
      t *= prm.rho;
    }
    if (!accepted) {
      run.converged = true;
      break;
    }
    if (record_trace) run.trace.push_back({k + 1, phi, l1, l2, t, phin, required});
    x = xn;
    y = yn;
    ++k;
  }
  run.iterations = k;
  run.x = x;
  run.y = y;
  run.u = G * x;
  run.v = H * y;
  run.u /= run.u.norm();
  run.v /= run.v.norm();
  run.value = run.u.dot(A * run.v);
  return run;
}

SrplMultistartResult multistart_srpl(const SVInstance& inst, const SrplMultistartConfig& cfg) {
  const auto t0 = Clock::now();
  auto elapsed = [&]() { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  SrplMultistartResult res;
  res.values.assign(cfg.restarts, std::nan(""));
  res.finish_times.assign(cfg.restarts, std::nan(""));
  if (cfg.record_traces) res.traces.resize(cfg.restarts);
  const int p = inst.P().num_generators();
  const int q = inst.Q().num_generators();
  std::atomic<int> next(0);
  std::atomic<bool> stop(false);
  std::mutex mu;

  auto worker = [&]() {
    while (!stop) {
      const int r = next++;
      if (r >= cfg.restarts) return;
      if (std::isfinite(cfg.time_budget) && elapsed() > cfg.time_budget) {
        stop = true;
        return;
      }
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      const Vector x0 = dirichlet_uniform(rng, p);
      const Vector y0 = dirichlet_uniform(rng, q);
      SrplRun run = srpl_run(inst, x0, y0, cfg.params, cfg.record_traces);
      std::lock_guard<std::mutex> lock(mu);
      res.values[r] = run.value;
      res.finish_times[r] = elapsed();
      res.total_iterations += run.iterations;
      ++res.restarts_done;
      if (cfg.record_traces) res.traces[r] = run.trace;
      const bool better = res.best_restart < 0 || run.value < res.best.value ||
                          (run.value == res.best.value && r < res.best_restart);
      if (better) {
        res.best = std::move(run);
        res.best_restart = r;
        if (cfg.target && res.best.value <= *cfg.target && res.time_to_target < 0.0) {
          res.time_to_target = elapsed();
          stop = true;
        }
      }
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (res.best_restart < 0)
    throw Error(ErrorCode::NumericalFailure, "multistart_srpl: no restart completed");
  refine_on_support(inst, res.best);
  res.elapsed = elapsed();
  return res;
}

Solution solve_srpl(const SVInstance& inst, const SrplMultistartConfig& cfg) {
  const auto t0 = Clock::now();
  SrplMultistartResult ms = multistart_srpl(inst, cfg);
  Solution sol = make_solution(inst, ms.best.u, ms.best.v, Status::Heuristic, "srpl");
  sol.work = ms.total_iterations;
  sol.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  emit_solution(sol);
  return sol;
}

void write_srpl_trace(std::ostream& os, const std::vector<SrplTraceRow>& trace) {
  os << "k,phi,abs_l1,abs_l2,step\n";
  os << std::setprecision(17);
  for (const SrplTraceRow& r : trace)
    os << r.k << ',' << r.phi << ',' << std::abs(r.l1) << ',' << std::abs(r.l2) << ',' << r.step
       << '\n';
}

}  // namespace conesv
