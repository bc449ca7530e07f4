#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <conesv/cones.hpp>

#include "oracles.hpp"
#include "random.hpp"

using namespace conesv;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(MakeCone, IdentityColumnsGiveOrthant) {
  const PolyhedralCone K = make_cone(Matrix::Identity(3, 3));
  EXPECT_EQ(K.num_generators(), 3);
  EXPECT_TRUE(K.pointed());
}

TEST(MakeCone, NormalizesAndDropsDuplicates) {
  Matrix G(2, 3);
  G << 1, 2, 0, 0, 0, 3;
  const PolyhedralCone K = make_cone(G);
  ASSERT_EQ(K.num_generators(), 2);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(K.generators().col(j).norm(), 1.0, 1e-12);
}

TEST(MakeCone, LineIsNotPointed) {
  Matrix G(2, 2);
  G << 1, -1, 0, 0;
  EXPECT_FALSE(make_cone(G).pointed());
}

TEST(MakeCone, ZeroColumnRejected) {
  Matrix G = Matrix::Identity(2, 2);
  G.col(1).setZero();
  try {
    make_cone(G);
    FAIL() << "expected InvalidGenerator";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidGenerator);
  }
}

TEST(Orthant, GeneratorsAreIdentity) {
  EXPECT_EQ(orthant(1).generators(), Matrix::Identity(1, 1));
  EXPECT_EQ(orthant(3).generators(), Matrix::Identity(3, 3));
  for (int n = 1; n <= 6; ++n) EXPECT_TRUE(orthant(n).pointed());
}

TEST(SchurCone, Generators) {
  const PolyhedralCone K2 = schur_cone(2);
  ASSERT_EQ(K2.num_generators(), 1);
  EXPECT_NEAR(K2.generators()(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(K2.generators()(1, 0), -1.0 / std::sqrt(2.0), 1e-15);
  for (int n : {3, 5, 9}) {
    const PolyhedralCone K = schur_cone(n);
    ASSERT_EQ(K.num_generators(), n - 1);
    for (int j = 0; j < n - 1; ++j) {
      EXPECT_EQ(K.generators().col(j).sum(), 0.0);
      EXPECT_NEAR(K.generators().col(j).norm(), 1.0, 1e-15);
    }
    EXPECT_TRUE(K.pointed());
    Eigen::FullPivLU<Matrix> lu(K.generators());
    EXPECT_EQ(lu.rank(), n - 1);
  }
  EXPECT_THROW(schur_cone(1), Error);
}

TEST(IsPointed, Examples) {
  EXPECT_TRUE(is_pointed(Matrix::Identity(4, 4)));
  Matrix line(2, 2);
  line << 1, -1, 0, 0;
  EXPECT_FALSE(is_pointed(line));
  Matrix plane(3, 3);  // three rays summing to zero span a plane
  plane << 1, -0.5, -0.5, 0, std::sqrt(0.75), -std::sqrt(0.75), 0, 0, 0;
  EXPECT_FALSE(is_pointed(plane));
}

TEST(ProjectCone, OrthantAndInterior) {
  const PolyhedralCone K = orthant(2);
  const ConeProjection p = project_cone(K, vec2(1, -1));
  EXPECT_LE((p.point - vec2(1, 0)).norm(), 1e-14);
  const Vector z = vec2(0.3, 0.7);
  EXPECT_LE((project_cone(K, z).point - z).norm(), 1e-14);
}

TEST(ProjectCone, MatchesFaceEnumerationAndMoreau) {
  for (int t = 0; t < 40; ++t) {
    const int m = 3 + t % 3;
    const int p = 2 + t % 5;
    const PolyhedralCone K = make_cone(testrand::gaussian(m, p, 2000 + t));
    const Vector z = testrand::gaussian_vec(m, 2100 + t);
    const ConeProjection pr = project_cone(K, z);
    const Vector ref = oracle::cone_projection_bruteforce(K.generators(), z);
    EXPECT_LE((pr.point - ref).norm(), 1e-8) << "trial " << t;
    EXPECT_LE((K.generators() * pr.coeffs - pr.point).norm(), 1e-10);
    EXPECT_GE(pr.coeffs.minCoeff(), 0.0);
    EXPECT_LE(std::abs((z - pr.point).dot(pr.point)), 1e-8 * z.squaredNorm());
    EXPECT_NEAR(z.squaredNorm(), pr.point.squaredNorm() + (z - pr.point).squaredNorm(), 1e-6);
    EXPECT_LE((project_cone(K, pr.point).point - pr.point).norm(), 1e-8);
  }
}

TEST(RaySubproblem, OrthantExamples) {
  const PolyhedralCone K = orthant(2);
  const Matrix I = Matrix::Identity(2, 2);
  RayResult r = ray_subproblem(I, vec2(1, 0), K);
  EXPECT_LE((r.v - vec2(0, 1)).norm(), 1e-14);
  EXPECT_NEAR(r.value, 0.0, 1e-14);
  r = ray_subproblem(I, vec2(-1, 0), K);
  EXPECT_LE((r.v - vec2(1, 0)).norm(), 1e-14);
  EXPECT_NEAR(r.value, -1.0, 1e-14);
}

TEST(RaySubproblem, MatchesAngularGridOnPlanarCones) {
  for (int t = 0; t < 20; ++t) {
    const double a0 = 2 * std::numbers::pi * testrand::uniform(1, 1, 0, 1, 2200 + t)(0, 0);
    const double width = std::numbers::pi * testrand::uniform(1, 1, 0.05, 0.95, 2300 + t)(0, 0);
    Matrix G(2, 2);
    G << std::cos(a0), std::cos(a0 + width), std::sin(a0), std::sin(a0 + width);
    const PolyhedralCone K = make_cone(G);
    const Matrix A = testrand::gaussian(2, 2, 2400 + t);
    Vector z = testrand::gaussian_vec(2, 2500 + t);
    z.normalize();
    const RayResult r = ray_subproblem(A, z, K);
    double best = kInf;
    const int N = 100000;
    for (int k = 0; k <= N; ++k) {
      const double a = a0 + width * k / N;
      best = std::min(best, z.dot(A * vec2(std::cos(a), std::sin(a))));
    }
    EXPECT_NEAR(r.value, best, 1e-8) << "trial " << t;
    EXPECT_NEAR(r.v.norm(), 1.0, 1e-12);
    EXPECT_GE(r.value, -A.norm() - 1e-8);
  }
}

TEST(MatrixOracles, PsdProjectionAndNegativePart) {
  const ConeOracle psd = psd_oracle(2);
  Matrix D(2, 2);
  D << 1, 0, 0, -2;
  Matrix expect(2, 2);
  expect << 1, 0, 0, 0;
  EXPECT_LE((smat(psd.project(svec(D)), 2) - expect).norm(), 1e-12);
  D << 1, 0, 0, -3;
  expect << 0, 0, 0, 1;
  EXPECT_LE((smat(psd.best_generator(svec(D)), 2) - expect).norm(), 1e-12);
}

TEST(MatrixOracles, NonnegativeSymmetric) {
  const ConeOracle nn = nonneg_sym_oracle(2);
  Matrix C(2, 2);
  C << 0, -1, -1, 0;
  Matrix expect(2, 2);
  expect << 0, 1, 1, 0;
  expect /= std::sqrt(2.0);
  EXPECT_LE((smat(nn.best_generator(svec(C)), 2) - expect).norm(), 1e-12);
  Matrix S(2, 2);
  S << -1, 2, 2, 3;
  Matrix clamp(2, 2);
  clamp << 0, 2, 2, 3;
  EXPECT_LE((smat(nn.project(svec(S)), 2) - clamp).norm(), 1e-12);
}

TEST(MatrixOracles, NoImprovingDirection) {
  try {
    psd_oracle(2).best_generator(svec(Matrix::Identity(2, 2)));
    FAIL() << "expected NoImprovingDirection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoImprovingDirection);
  }
  EXPECT_THROW(nonneg_sym_oracle(3).best_generator(svec(Matrix::Ones(3, 3))), Error);
}

TEST(MatrixOracles, ProjectionCharacterization) {
  for (int t = 0; t < 20; ++t) {
    const Matrix S = testrand::symmetric(4, 2600 + t);
    const Vector z = svec(S);
    for (const ConeOracle& K : {psd_oracle(4), nonneg_sym_oracle(4)}) {
      const Vector p = K.project(z);
      EXPECT_LE(std::abs((z - p).dot(p)), 1e-8 * std::max(1.0, z.squaredNorm()));
      EXPECT_LE((K.project(p) - p).norm(), 1e-10);
    }
  }
}

TEST(Svec, PreservesFrobeniusInnerProduct) {
  const Matrix X = testrand::symmetric(5, 2700);
  const Matrix Y = testrand::symmetric(5, 2701);
  EXPECT_NEAR(svec(X).dot(svec(Y)), (X * Y).trace(), 1e-12);
  EXPECT_LE((smat(svec(X), 5) - X).norm(), 1e-14);
  EXPECT_EQ(svec_dim(5), 15);
}

TEST(PolyhedralOracle, BestGeneratorMinimizes) {
  const PolyhedralCone K = make_cone(testrand::gaussian(4, 6, 2800));
  const ConeOracle o = polyhedral_oracle(K);
  const Vector c = testrand::gaussian_vec(4, 2801);
  const Vector g = o.best_generator(c);
  EXPECT_NEAR(g.norm(), 1.0, 1e-12);
  for (int j = 0; j < K.num_generators(); ++j)
    EXPECT_LE(g.dot(c), K.generators().col(j).dot(c) + 1e-12);
}
