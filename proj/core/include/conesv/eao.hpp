#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "conesv/instance.hpp"

namespace conesv {

// Unit element of K minimizing <., c>: the normalized projection of -c when
// that is nonzero, otherwise the oracle's best generator.
Vector sphere_linmin(const ConeOracle& K, const Vector& c);

struct EaoParams {
  int max_iter = 500;
  double delta = 1e-6;
  double beta = 0.5;   // initial extrapolation weight
  double eta = 2.0;    // weight reduction after a rollback
  double gamma = 1.05; // weight growth otherwise
};

struct EaoTraceRow {
  int iteration = 0;
  double value = 0.0;
  double beta = 0.0;
  bool restarted = false;
};

struct EaoRun {
  Vector u, v;
  double value = 0.0;
  int iterations = 0;
  std::vector<EaoTraceRow> trace;
};

// Alternating minimization with extrapolation and rollback, started from
// the extrapolated point v0.
EaoRun eao_run(const Matrix& A, const ConeOracle& P, const ConeOracle& Q, const Vector& v0,
               const EaoParams& params = {}, bool record_trace = false);

using OracleFactory = std::function<ConeOracle()>;

struct MultistartConfig {
  int restarts = 10;
  double time_budget = kInf;  // seconds; restarts stop when exceeded
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<double> target;  // stop as soon as best value <= target
  bool record_traces = false;
  EaoParams params;
};

struct MultistartResult {
  EaoRun best;
  int best_restart = -1;
  int restarts_done = 0;
  long long total_iterations = 0;
  double elapsed = 0.0;
  double time_to_target = -1.0;  // seconds, -1 if never reached
  std::vector<double> values;    // per restart, NaN if skipped
  std::vector<double> finish_times;  // seconds from start, NaN if skipped
  std::vector<std::vector<EaoTraceRow>> traces;
};

// Restart r draws u0 ~ N(0, I) from a generator seeded by (seed, r) and
// starts from v0 = sphere_linmin(Q, A^T u0). Ties go to the lower index.
MultistartResult multistart_eao(const Matrix& A, const OracleFactory& make_P,
                                const OracleFactory& make_Q, const MultistartConfig& cfg);

Solution solve_eao(const SVInstance& inst, const MultistartConfig& cfg = {});

// First-order residual for oracle cones: norms, membership via projection,
// and stationarity via ||proj_K(-(gradient))||, gradients scaled by
// max(1, ||A||).
double oracle_kkt_residual(const Matrix& A, const ConeOracle& P, const ConeOracle& Q,
                           const Vector& u, const Vector& v);

void write_eao_trace(std::ostream& os, const std::vector<EaoTraceRow>& trace);

}  // namespace conesv
