#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "conesv/instance.hpp"

namespace conesv {

struct SrplParams {
  double beta = 1.0;     // initial step
  double alpha = 1e-3;   // sufficient decrease constant
  double delta = 1e-6;   // stationarity tolerance
  int max_iter = 5000;
  double rho = 0.2;      // backtracking factor
  double mu1 = 0.25;     // proximal weight, x-side
  double mu2 = 0.01;     // proximal weight, y-side
};

enum class SrplPreset { SchurOrthant, SchurSchur, CirculantPsv, MatrixCone };

SrplParams srpl_preset(SrplPreset preset);

struct SrplTraceRow {
  int k = 0;
  double phi = 0.0;       // objective before the step
  double l1 = 0.0;        // linearized decrease, x-side (<= 0)
  double l2 = 0.0;        // linearized decrease, y-side (<= 0)
  double step = 0.0;      // accepted t_k
  double phi_next = 0.0;  // objective after the step
  double required = 0.0;  // alpha t (l1 + l2) / (||Gx|| ||Hy||)
};

struct SrplRun {
  Vector x, y;  // simplex coordinates
  Vector u, v;  // unit pair
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<SrplTraceRow> trace;
};

// Normalized bilinear objective <Gx, A Hy> / (||Gx|| ||Hy||) on the simplices.
double srpl_objective(const SVInstance& inst, const Vector& x, const Vector& y);

// Cost vector of the linearized model at (x, y) with ratio value `delta`:
// which = 1 gives c with L1(d) = <c, d> on the x-side, which = 2 the y-side.
// Throws NonPointedDegeneracy when G x or H y vanishes.
Vector srpl_linearization(const SVInstance& inst, const Vector& x, const Vector& y,
                          double delta, int which);

// Both cones must be pointed (NotPointed otherwise); x0, y0 on the simplices.
SrplRun srpl_run(const SVInstance& inst, const Vector& x0, const Vector& y0,
                 const SrplParams& params, bool record_trace = false);

struct SrplMultistartConfig {
  int restarts = 10;
  double time_budget = kInf;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<double> target;
  bool record_traces = false;
  SrplParams params;
};

struct SrplMultistartResult {
  SrplRun best;  // refined to the exact critical pair on its support when that helps
  int best_restart = -1;
  int restarts_done = 0;
  long long total_iterations = 0;
  double elapsed = 0.0;
  double time_to_target = -1.0;
  std::vector<double> values;
  std::vector<double> finish_times;  // seconds from start, NaN if skipped
  std::vector<std::vector<SrplTraceRow>> traces;
};

// Restart r draws uniform (Dirichlet(1)) points seeded by (seed, r).
SrplMultistartResult multistart_srpl(const SVInstance& inst, const SrplMultistartConfig& cfg);

Solution solve_srpl(const SVInstance& inst, const SrplMultistartConfig& cfg = {});

void write_srpl_trace(std::ostream& os, const std::vector<SrplTraceRow>& trace);

}  // namespace conesv
