#include <random>

#include <benchmark/benchmark.h>

#include <conesv/conesv.hpp>

using namespace conesv;

namespace {

Matrix gaussian(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = n(rng);
  return M;
}

void BM_Nnls(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix M = gaussian(2 * n, n, 1);
  const Vector b = gaussian(2 * n, 1, 2).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(nnls(M, b));
}
BENCHMARK(BM_Nnls)->Arg(10)->Arg(50)->Arg(200);

void BM_ProjectSchurCone(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PolyhedralCone K = schur_cone(n);
  const Vector z = gaussian(n, 1, 3).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(project_cone(K, z));
}
BENCHMARK(BM_ProjectSchurCone)->Arg(20)->Arg(200);

void BM_ProjectSimplex(benchmark::State& state) {
  const Vector z = gaussian(static_cast<int>(state.range(0)), 1, 4).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(project_simplex(z));
}
BENCHMARK(BM_ProjectSimplex)->Arg(100)->Arg(10000);

// Box-constrained LP of the size BnB solves at a node.
void BM_LpSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix A = gaussian(2 * n, n, 5);
  const Vector b = Vector::Ones(2 * n);
  const Vector c = gaussian(n, 1, 6).col(0);
  const Vector lo = -Vector::Ones(n), hi = Vector::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(lp_solve(c, A, b, lo, hi));
}
BENCHMARK(BM_LpSolve)->Arg(10)->Arg(40);

}  // namespace
