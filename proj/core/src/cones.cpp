#include "conesv/cones.hpp"

#include <algorithm>
#include <cmath>

namespace conesv {

PolyhedralCone make_cone(const Matrix& G, const std::string& label) {
  if (G.rows() == 0 || G.cols() == 0)
    throw Error(ErrorCode::InvalidInput, "make_cone: empty generator matrix");
  if (!G.allFinite())
    throw Error(ErrorCode::InvalidInput, "make_cone: non-finite generator entry");

  const int m = static_cast<int>(G.rows());
  std::vector<Vector> kept;
  for (int j = 0; j < G.cols(); ++j) {
    const double nrm = G.col(j).norm();
    if (!(nrm > 0.0))
      throw Error(ErrorCode::InvalidGenerator,
                  "make_cone: generator " + std::to_string(j) + " is zero");
    Vector g = G.col(j) / nrm;
    bool dup = false;
    for (const Vector& k : kept)
      if (k.dot(g) >= 1.0 - 1e-12) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(g));
  }

  auto data = std::make_shared<PolyhedralCone::Data>();
  data->G.resize(m, static_cast<Eigen::Index>(kept.size()));
  for (size_t j = 0; j < kept.size(); ++j) data->G.col(j) = kept[j];
  data->gram = data->G.transpose() * data->G;
  data->pointed = is_pointed(data->G);
  data->orthant = data->G.rows() == data->G.cols() &&
                  (data->G - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-15;
  data->label = label;
  PolyhedralCone K;
  K.data_ = std::move(data);
  return K;
}

PolyhedralCone orthant(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "orthant: n must be >= 1");
  return make_cone(Matrix::Identity(n, n), "orthant(" + std::to_string(n) + ")");
}

PolyhedralCone schur_cone(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "schur_cone: n must be >= 2");
  Matrix G = Matrix::Zero(n, n - 1);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n - 1; ++i) {
    G(i, i) = s;
    G(i + 1, i) = -s;
  }
  return make_cone(G, "schur(" + std::to_string(n) + ")");
}

bool is_pointed(const Matrix& G) {
  const int m = static_cast<int>(G.rows());
  const int p = static_cast<int>(G.cols());
  if (p <= m) {
    Eigen::JacobiSVD<Matrix> svd(G);
    const Vector& s = svd.singularValues();
    if (s(p - 1) > 1e-9 * s(0)) return true;
  }
  Matrix A(2 * m, p);
  A.topRows(m) = G;
  A.bottomRows(m) = -G;
  Vector b = Vector::Constant(2 * m, 1e-9);
  Vector c = -Vector::Ones(p);
  LpResult lp = lp_solve(c, A, b, Vector::Zero(p), Vector::Ones(p));
  if (lp.status != LpStatus::Optimal)
    throw Error(ErrorCode::NumericalFailure, "is_pointed: LP did not solve");
  return -lp.objective <= 1e-6;
}

ConeProjection project_cone(const PolyhedralCone& K, const Vector& z, std::vector<int>* warm,
                            NnlsFactorCache* cache) {
  if (z.size() != K.ambient_dim())
    throw Error(ErrorCode::InvalidInput, "project_cone: dimension mismatch");
  if (!z.allFinite()) throw Error(ErrorCode::InvalidInput, "project_cone: non-finite point");
  ConeProjection out;
  if (K.is_orthant()) {
    out.coeffs = z.cwiseMax(0.0);
    out.point = out.coeffs;
    if (warm) {
      warm->clear();
      for (int j = 0; j < z.size(); ++j)
        if (z(j) > 0.0) warm->push_back(j);
    }
    return out;
  }
  const Matrix& G = K.generators();
  const Vector c = G.transpose() * z;
  const int cap = 10 * std::max(K.ambient_dim(), K.num_generators());
  static const std::vector<int> none;
  NnlsResult r = nnls_gram(K.gram(), c, z.squaredNorm(), warm ? *warm : none, cap, cache);
  out.coeffs = std::move(r.x);
  out.point = G * out.coeffs;
  if (warm) {
    warm->clear();
    for (int j = 0; j < out.coeffs.size(); ++j)
      if (out.coeffs(j) > 0.0) warm->push_back(j);
  }
  return out;
}

RayResult ray_subproblem(const Matrix& A, const Vector& z, const PolyhedralCone& K) {
  if (A.rows() != z.size() || A.cols() != K.ambient_dim())
    throw Error(ErrorCode::InvalidInput, "ray_subproblem: dimension mismatch");
  const Vector c = A.transpose() * z;
  ConeProjection proj = project_cone(K, -c);
  const double nrm = proj.point.norm();
  RayResult out;
  if (nrm > 1e-12 * c.norm()) {
    out.v = proj.point / nrm;
    out.value = c.dot(out.v);
    return out;
  }
  const Vector scores = K.generators().transpose() * c;
  Eigen::Index j = 0;
  scores.minCoeff(&j);
  out.v = K.generators().col(j);
  out.value = scores(j);
  return out;
}

ConeOracle polyhedral_oracle(const PolyhedralCone& K) {
  ConeOracle o;
  o.descriptor = K.label().empty() ? "polyhedral" : K.label();
  o.dim = K.ambient_dim();
  struct WarmState {
    std::vector<int> passive;
    NnlsFactorCache factor;
  };
  auto warm = std::make_shared<WarmState>();
  o.project = [K, warm](const Vector& z) {
    return project_cone(K, z, &warm->passive, &warm->factor).point;
  };
  o.best_generator = [K](const Vector& c) -> Vector {
    const Vector scores = K.generators().transpose() * c;
    Eigen::Index j = 0;
    scores.minCoeff(&j);
    return K.generators().col(j);
  };
  return o;
}

}  // namespace conesv
