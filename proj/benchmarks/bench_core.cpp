#include <benchmark/benchmark.h>

#include "blindid/mc.hpp"
#include "blindid/recovery.hpp"
#include "blindid/spectral.hpp"

using namespace blindid;

static void BM_Dft(benchmark::State& state) {
  Rng rng(1);
  const CVector v = rng.complex_normal_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dft(v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dft)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_ApplyA(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Ensemble ens = build_complex_ensemble(ConstraintScenario::subspace(n, 4, 4),
                                              EnsembleTag::complex_generic(), 2);
  const CMatrix M = CMatrix::Ones(4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(apply_A(ens, M));
}
BENCHMARK(BM_ApplyA)->Arg(16)->Arg(64)->Arg(256);

static void BM_SolveFixedSupport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sc = ConstraintScenario::subspace(n, 3, 3);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 3);
  Rng rng(4);
  const LiftedMatrix M0 = LiftedMatrix::rank_one(rng.complex_normal_vector(3), rng.complex_normal_vector(3));
  const CVector z = apply_A(ens, M0);
  const SupportPair full{{0, 1, 2}, {0, 1, 2}};
  for (auto _ : state) {
    Rng local(5);
    benchmark::DoNotOptimize(solve_fixed_support(ens, z, full, 5, local));
  }
}
// n = 7 runs alternating minimization, n >= 9 the least-squares path.
BENCHMARK(BM_SolveFixedSupport)->Arg(7)->Arg(9)->Arg(32);

static void BM_SmallBall(benchmark::State& state) {
  const CMatrix M = CMatrix::Ones(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_small_ball_prob(M, 1.0, 0.1, 10000, 6));
}
BENCHMARK(BM_SmallBall);

BENCHMARK_MAIN();
