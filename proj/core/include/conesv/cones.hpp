#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "conesv/numerics.hpp"

namespace conesv {

// Finitely generated cone {G x : x >= 0} with unit, pairwise distinct
// generator columns. Cheap to copy.
class PolyhedralCone {
 public:
  PolyhedralCone() = default;

  const Matrix& generators() const { return data_->G; }
  // G^T G, cached for projections.
  const Matrix& gram() const { return data_->gram; }
  int ambient_dim() const { return static_cast<int>(data_->G.rows()); }
  int num_generators() const { return static_cast<int>(data_->G.cols()); }
  bool pointed() const { return data_->pointed; }
  bool is_orthant() const { return data_->orthant; }
  const std::string& label() const { return data_->label; }

 private:
  struct Data {
    Matrix G;
    Matrix gram;
    bool pointed = true;
    bool orthant = false;
    std::string label;
  };
  std::shared_ptr<const Data> data_;

  friend PolyhedralCone make_cone(const Matrix& G, const std::string& label);
};

// Normalizes columns and drops near-duplicates (cosine >= 1 - 1e-12).
// Throws InvalidGenerator on a zero column.
PolyhedralCone make_cone(const Matrix& G, const std::string& label = "");

PolyhedralCone orthant(int n);

// Generators (e_i - e_{i+1}) / sqrt(2), i = 1..n-1.
PolyhedralCone schur_cone(int n);

// True iff no nonzero x >= 0 has G x = 0 (checked by LP with a 1e-6 margin).
bool is_pointed(const Matrix& G);

struct ConeProjection {
  Vector point;   // projection of z onto the cone
  Vector coeffs;  // x >= 0 with G x = point
};

// `warm`, if given, seeds the NNLS passive set and receives the new support.
// `cache` keeps the last factorization; use one per cone.
ConeProjection project_cone(const PolyhedralCone& K, const Vector& z,
                            std::vector<int>* warm = nullptr, NnlsFactorCache* cache = nullptr);

struct RayResult {
  Vector v;
  double value = 0.0;
};

// argmin { <z, A v> : v in K, ||v|| = 1 }.
RayResult ray_subproblem(const Matrix& A, const Vector& z, const PolyhedralCone& K);

// Projection and linear-minimization access to a closed convex cone living
// in R^dim (matrix cones use the svec flattening below).
struct ConeOracle {
  std::string descriptor;
  int dim = 0;
  std::function<Vector(const Vector&)> project;
  // Unit element of the cone minimizing <., c>.
  std::function<Vector(const Vector&)> best_generator;
};

// Stateful: keeps the last NNLS support for warm starts, so use one oracle
// per thread.
ConeOracle polyhedral_oracle(const PolyhedralCone& K);

// Symmetric n x n matrices, flattened by svec.
ConeOracle psd_oracle(int n);
ConeOracle nonneg_sym_oracle(int n);

// Upper triangle, row-major, off-diagonals scaled by sqrt(2) so that
// <svec(X), svec(Y)> = trace(X Y).
Vector svec(const Matrix& S);
Matrix smat(const Vector& v, int n);
int svec_dim(int n);

}  // namespace conesv
