#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "conesv/eao.hpp"
#include "conesv/instance.hpp"

namespace conesv {

struct BnbConfig {
  double gap_tol = 1e-6;  // relative: stop when incumbent - lower <= gap_tol * max(1, |incumbent|)
  double time_limit = kInf;
  long long max_nodes = 5'000'000;
  // Incumbent pair to start from; otherwise a short E-AO multistart runs first.
  std::optional<std::pair<Vector, Vector>> warm_start;
  int root_restarts = 4;
  std::uint64_t seed = 0;
  EaoParams polish{200, 1e-6, 0.5, 2.0, 1.05};
  int max_cut_rounds = 1;  // ball cut rounds per node before branching
  bool record_log = true;
};

struct BnbNodeLog {
  long long node = 0;
  double bound = 0.0;         // this node's relaxation bound
  double incumbent = 0.0;
  double global_lower = 0.0;  // smallest bound among open nodes
  int depth = 0;
  double time = 0.0;
};

struct BnbResult {
  Solution solution;
  std::vector<BnbNodeLog> log;
  long long nodes = 0;
  double lower = 0.0;
  int lp_failures = 0;
  // Unit directions g of the ball cuts <g, u> <= 1 added during the search,
  // in u- and v-space (record_log only, first 100000 each).
  std::vector<Vector> cuts_u, cuts_v;
};

// Largest x_i over {x >= 0, -1 <= (G x)_k <= 1}; NotPointed if unbounded.
Vector variable_bounds(const Matrix& G);

// Half-planes a*x + b*y + c*w <= d enclosing w = x*y over a box, in the
// order: two lower envelopes, then two upper envelopes.
struct Plane {
  double a, b, c, d;
};
std::array<Plane, 4> mccormick_planes(double lx, double ux, double ly, double uy);

// Spatial branch and bound on min x' (G'AH) y, ||Gx|| <= 1, ||Hy|| <= 1, x, y >= 0.
// Requires pointed cones.
BnbResult solve_bnb_detailed(const SVInstance& inst, const BnbConfig& cfg = {});
Solution solve_bnb(const SVInstance& inst, const BnbConfig& cfg = {});

void write_node_log(std::ostream& os, const std::vector<BnbNodeLog>& log);

// The problem in (u, v, x, y) variables as an LP-format quadratic model for
// external MIQCP solvers. Numbers carry 17 significant digits.
void export_miqcp(const SVInstance& inst, std::ostream& os);

struct MiqcpModel {
  Matrix A, G, H;
};
// Reads back files written by export_miqcp.
MiqcpModel read_miqcp(std::istream& is);

}  // namespace conesv
