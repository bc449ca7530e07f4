#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conesv/eao.hpp"
#include "conesv/instance.hpp"

namespace conesv {

struct GeneratedInstance {
  std::string name;
  SVInstance inst;
  std::optional<double> known_lambda;
  std::optional<Vector> known_u, known_v;
};

// Schur cone against the nonnegative orthant in R^n; the optimum is known
// in closed form: -sqrt(1 - 1/n) at u ~ e/n - e_n, v = e_n.
GeneratedInstance gen_schur_orthant(int n);

// Schur cone against itself; optimum cos((n-1) pi / n).
GeneratedInstance gen_schur_schur(int n);

// Bipartite graph B (0/1, m x n) and the instance PSV(-M) with
// M = B - d (ee^T - B), d = max(m, n).
struct BicliqueInstance {
  Matrix B;
  int d = 0;
  SVInstance inst;
  std::vector<int> planted_rows, planted_cols;
};

BicliqueInstance biclique_instance(const Matrix& B);

// Random graph with edge density `density`, plus a planted all-ones block of
// size rows x cols on random row/column subsets.
BicliqueInstance gen_biclique(int m, int n, double density, int rows, int cols,
                              std::uint64_t seed);

struct BicliqueExtraction {
  std::vector<int> rows, cols;
  long long edge_estimate = 0;  // round(lambda^2)
  bool valid = false;           // every (row, col) in the block is an edge
};

// Rows/columns where u/v exceed threshold * max entry.
BicliqueExtraction extract_biclique(const BicliqueInstance& bi, const Solution& sol,
                                    double threshold = 1e-6);

// "m n" header, then one "u v" pair (1-based) per line; '#' starts a comment.
Matrix read_edge_list(std::istream& is);
void write_edge_list(std::ostream& os, const Matrix& B);

// Symmetric circulant pair search for odd n reduces to PSV of the
// ((n-1)/2)-square matrix M_ij = (2/sqrt n) cos(2 pi i j / n).
struct CirculantReduction {
  int n = 0;
  int m = 0;
  SVInstance inst;
};

CirculantReduction gen_circulant(int n);

struct CirculantPair {
  Matrix P;  // PSD circulant
  Matrix N;  // nonnegative circulant with zero diagonal
  double angle = 0.0;
};

// Builds the matrix pair from a PSV solution; angle is the angle between
// P and N in the Frobenius inner product.
CirculantPair reconstruct_circulant(const CirculantReduction& red, const Vector& u,
                                    const Vector& v);

// Largest angle between the PSD and the nonnegative symmetric n x n
// matrices, by multistart alternating minimization.
struct MatrixConeAngle {
  double lambda = 0.0;
  double angle = 0.0;
  Matrix X;  // PSD side
  Matrix Y;  // nonnegative side
  double kkt_residual = 0.0;
  MultistartResult runs;
};

MatrixConeAngle ma_psd_nn(int n, const MultistartConfig& cfg);

}  // namespace conesv
