#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <conesv/conesv.hpp>

namespace conesv::cli {

inline constexpr const char* kSchema = "cone-sv/1";

enum ExitCode : int {
  kExitSolved = 0,
  kExitBoundOnly = 2,
  kExitInputError = 3,
  kExitNumericalFailure = 4,
};

struct RunConfig {
  std::string command;
  std::string algo = "auto";  // bfas, bnb, eao, srpl, auto
  double tol = 1e-6;          // BnB gap; E-AO / SRPL stopping tolerance
  double time_limit = kInf;
  int restarts = 10;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output = "text";  // text, json
  std::string preset;           // SRPL weights: schur-orthant, schur-schur, circulant, matrix-cone
  bool omit_timing = false;
  int auto_cap = 24;
};

// Which stage produced the answer.
struct PipelineResult {
  Solution solution;
  std::string answered_by;
};

// Nonnegative case, then the extreme case, then the configured solver.
// `auto` runs BFAS when p + q <= auto_cap (or a cone is not pointed),
// otherwise BnB warm-started from E-AO.
PipelineResult solve_pipeline(const SVInstance& inst, const RunConfig& cfg);

// Exact answer when both cones live in dimension <= 3: scan ray
// subproblems anchored at every generator of either cone.
Solution generator_anchored(const SVInstance& inst);

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conesv::cli
