#include <benchmark/benchmark.h>

#include <conesv/conesv.hpp>

using namespace conesv;

namespace {

void BM_BfasSchurOrthant(benchmark::State& state) {
  const GeneratedInstance g = gen_schur_orthant(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bfas(g.inst));
}
BENCHMARK(BM_BfasSchurOrthant)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

void BM_BnbSchurOrthant(benchmark::State& state) {
  const GeneratedInstance g = gen_schur_orthant(static_cast<int>(state.range(0)));
  BnbConfig cfg;
  cfg.record_log = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_bnb(g.inst, cfg));
}
BENCHMARK(BM_BnbSchurOrthant)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

// One E-AO restart on the large Schur/orthant instance.
void BM_EaoSchurOrthant200(benchmark::State& state) {
  const GeneratedInstance g = gen_schur_orthant(200);
  const ConeOracle P = polyhedral_oracle(g.inst.P());
  const ConeOracle Q = polyhedral_oracle(g.inst.Q());
  const Vector v0 = Vector::Ones(200).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(eao_run(g.inst.A(), P, Q, v0));
}
BENCHMARK(BM_EaoSchurOrthant200)->Unit(benchmark::kMillisecond);

void BM_SrplCirculant(benchmark::State& state) {
  const CirculantReduction red = gen_circulant(static_cast<int>(state.range(0)));
  const int p = red.inst.P().num_generators(), q = red.inst.Q().num_generators();
  // Uneven start; the barycenter is stationary by symmetry.
  const Vector x0 = Vector::LinSpaced(p, 1, p) / (p * (p + 1) / 2.0);
  const Vector y0 = Vector::LinSpaced(q, q, 1) / (q * (q + 1) / 2.0);
  const SrplParams params = srpl_preset(SrplPreset::CirculantPsv);
  for (auto _ : state) benchmark::DoNotOptimize(srpl_run(red.inst, x0, y0, params));
}
BENCHMARK(BM_SrplCirculant)->Arg(13)->Arg(23)->Unit(benchmark::kMillisecond);

}  // namespace
