#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "conesv/instance.hpp"

namespace conesv {

struct BfasProgress {
  long long pairs_evaluated = 0;
  int cardinality = 0;
  double incumbent = 0.0;
  double elapsed = 0.0;
};

struct BfasConfig {
  double time_limit = kInf;  // seconds
  int threads = 1;
  // Skip subsets of pairs that already produced a candidate or could not
  // beat the incumbent. Enumerates by decreasing cardinality, single thread.
  bool subset_prune = false;
  std::function<void(const BfasProgress&)> progress;
  long long progress_every = 4096;
};

// Outcome of the eigenvalue test on one support pair (I, J).
struct SupportEval {
  bool full_rank = false;
  double mu = 0.0;       // most negative eigenvalue of the restricted system
  bool pruned = false;   // mu could not beat the incumbent
  bool feasible = false; // a nonnegative eigenvector exists
  Vector u, v;           // unit pair, valid when feasible
  double value = 0.0;    // <u, A v>
};

// `prune_above`: skip the eigenvector work when mu exceeds it.
SupportEval eval_support_pair(const SVInstance& inst, const std::vector<int>& I,
                              const std::vector<int>& J, double prune_above = kInf);

// Nonnegative point of the unit simplex inside range(V) (V orthonormal
// columns), if min ||(V V^T - I) z|| over the simplex is <= 1e-7.
std::optional<Vector> feasibility_check(const Matrix& V);

// Exhaustive search over support pairs up to the saddle cardinality bound.
// Requires G^T A H to have a negative entry and the optimum to differ from
// -||A|| (run preprocessing first).
Solution solve_bfas(const SVInstance& inst, const BfasConfig& cfg = {});

}  // namespace conesv
