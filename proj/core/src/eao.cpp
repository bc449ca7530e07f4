#include "conesv/eao.hpp"

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
}

Vector sphere_linmin(const ConeOracle& K, const Vector& c) {
  const Vector p = K.project(-c);
  const double nrm = p.norm();
  if (nrm > 1e-12 * c.norm()) return p / nrm;
  return K.best_generator(c);
}

EaoRun eao_run(const Matrix& A, const ConeOracle& P, const ConeOracle& Q, const Vector& v0,
               const EaoParams& prm, bool record_trace) {
  if (A.rows() != P.dim || A.cols() != Q.dim || v0.size() != Q.dim)
    throw Error(ErrorCode::InvalidInput, "eao_run: dimension mismatch");
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Vector u = Vector::Zero(m), v = Vector::Zero(n);
  Vector up = u, vp = v, ve = v0;
  double beta = prm.beta, beta_p = prm.beta;
  bool rs = false;
  std::vector<double> e;  // e[k-1] holds e_k
  e.reserve(prm.max_iter);
  EaoRun run;

  int k = 1;
  auto keep_going = [&]() {
    if (k > prm.max_iter) return false;
    if (rs) return true;
    if ((u - up).norm() >= prm.delta || (v - vp).norm() >= prm.delta) return true;
    if (k <= 3) return true;
    const double e2 = e[k - 3], e1 = e[k - 2];
    return e2 - e1 >= prm.delta * e2;
  };

  while (keep_going()) {
    up = u;
    u = sphere_linmin(P, A * ve);
    const Vector ue = u + beta * (u - up);
    vp = v;
    v = sphere_linmin(Q, A.transpose() * ue);
    ve = v + beta * (v - vp);
    double ek = u.dot(A * v);
    rs = false;
    if (k >= 2 && ek > e[k - 2] && beta > 0.0) {
      u = up;
      v = vp;
      ve = vp;
      beta_p = beta / prm.eta;
      beta = 0.0;
      rs = true;
      ek = e[k - 2];
    } else if (k >= 2 && ek > e[k - 2]) {
      // A plain step cannot increase the value in exact arithmetic; this is
      // projection round-off, so hold the previous pair.
      u = up;
      v = vp;
      ve = vp;
      ek = e[k - 2];
      beta = std::min(1.0, prm.gamma * beta_p);
      beta_p = beta;
    } else {
      beta = std::min(1.0, prm.gamma * beta_p);
      beta_p = beta;
    }
    e.push_back(ek);
    if (record_trace) run.trace.push_back({k, ek, beta, rs});
    ++k;
  }
  run.u = u;
  run.v = v;
  run.value = u.dot(A * v);
  run.iterations = k - 1;
  return run;
}

MultistartResult multistart_eao(const Matrix& A, const OracleFactory& make_P,
                                const OracleFactory& make_Q, const MultistartConfig& cfg) {
  const auto t0 = Clock::now();
  auto elapsed = [&]() { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  MultistartResult res;
  res.values.assign(cfg.restarts, std::nan(""));
  res.finish_times.assign(cfg.restarts, std::nan(""));
  if (cfg.record_traces) res.traces.resize(cfg.restarts);
  std::atomic<int> next(0);
  std::atomic<bool> stop(false);
  std::mutex mu;

  auto worker = [&]() {
    const ConeOracle P = make_P();
    const ConeOracle Q = make_Q();
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
      std::normal_distribution<double> gauss;
      Vector u0(A.rows());
      for (int i = 0; i < u0.size(); ++i) u0(i) = gauss(rng);
      const Vector v0 = sphere_linmin(Q, A.transpose() * u0);
      EaoRun run;
      try {
        run = eao_run(A, P, Q, v0, cfg.params, cfg.record_traces);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NoImprovingDirection) throw;
        continue;
      }
      std::lock_guard<std::mutex> lock(mu);
      res.values[r] = run.value;
      res.finish_times[r] = elapsed();
      res.total_iterations += run.iterations;
      ++res.restarts_done;
      const bool better = res.best_restart < 0 || run.value < res.best.value ||
                          (run.value == res.best.value && r < res.best_restart);
      if (cfg.record_traces) res.traces[r] = run.trace;
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
  res.elapsed = elapsed();
  if (res.best_restart < 0)
    throw Error(ErrorCode::NumericalFailure, "multistart_eao: no restart completed");
  return res;
}

Solution solve_eao(const SVInstance& inst, const MultistartConfig& cfg) {
  const auto t0 = Clock::now();
  const PolyhedralCone P = inst.P();
  const PolyhedralCone Q = inst.Q();
  MultistartResult ms = multistart_eao(
      inst.A(), [&P]() { return polyhedral_oracle(P); }, [&Q]() { return polyhedral_oracle(Q); },
      cfg);
  Solution sol = make_solution(inst, ms.best.u, ms.best.v, Status::Heuristic, "eao");
  sol.work = ms.total_iterations;
  sol.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  emit_solution(sol);
  return sol;
}

double oracle_kkt_residual(const Matrix& A, const ConeOracle& P, const ConeOracle& Q,
                           const Vector& u, const Vector& v) {
  const double nu = u.norm(), nv = v.norm();
  if (!(nu > 1e-12) || !(nv > 1e-12))
    throw Error(ErrorCode::InvalidInput, "oracle_kkt_residual: u or v is (near) zero");
  double res = std::max(std::abs(nu - 1.0), std::abs(nv - 1.0));
  const Vector un = u / nu, vn = v / nv;
  res = std::max(res, (P.project(un) - un).norm());
  res = std::max(res, (Q.project(vn) - vn).norm());
  const double lambda = un.dot(A * vn);
  const double s = std::max(1.0, spectral_norm(A));
  const Vector gu = (A * vn - lambda * un) / s;
  const Vector gv = (A.transpose() * un - lambda * vn) / s;
  res = std::max(res, P.project(-gu).norm());
  res = std::max(res, Q.project(-gv).norm());
  return res;
}

void write_eao_trace(std::ostream& os, const std::vector<EaoTraceRow>& trace) {
  os << "iteration,value,beta,restarted\n";
  os << std::setprecision(17);
  for (const EaoTraceRow& r : trace)
    os << r.iteration << ',' << r.value << ',' << r.beta << ',' << (r.restarted ? 1 : 0) << '\n';
}

}  // namespace conesv
