#include <cmath>

#include <gtest/gtest.h>

#include "blindid/recovery.hpp"

using namespace blindid;

namespace {

CVector sparse_vector(int m, int s, Rng& rng) {
  CVector v = rng.complex_normal_vector(m);
  if (s <= 0 || s >= m) return v;
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < m - s; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.next_u64() % static_cast<std::uint64_t>(m - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    v(idx[static_cast<std::size_t>(i)]) = 0;
  }
  return v;
}

LiftedMatrix planted(int m1, int m2, Rng& rng, int s1 = 0, int s2 = 0) {
  const CVector x = sparse_vector(m1, s1, rng);
  const CVector y = sparse_vector(m2, s2, rng);
  return LiftedMatrix::rank_one(x / x.norm(), y / y.norm());
}

std::vector<int> iota(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

// Fraction of seeded noiseless trials recovered to within `tol`.
double success_rate(const ConstraintScenario& sc, EnsembleTag tag, int trials, int restarts,
                    double tol) {
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(500, static_cast<std::uint64_t>(t)));
    const Ensemble ens = build_ensemble(sc, tag, rng.next_u64());
    const LiftedMatrix M0 = planted(sc.m1, sc.m2, rng, sc.s1.value_or(0), sc.s2.value_or(0));
    const CVector z = apply_A(ens, M0);
    const RecoveryResult res = solve(ens, z, sc, restarts, rng);
    if (align_and_distance(res.estimate, M0) < tol) ++ok;
  }
  return static_cast<double>(ok) / trials;
}

}  // namespace

TEST(AlignAndDistance, Examples) {
  CVector x(2), y(2), x0(2), y0(2);
  x << 1, 0;
  y << 2, 0;
  x0 << 2, 0;
  y0 << 1, 0;
  EXPECT_EQ(align_and_distance(LiftedMatrix::rank_one(x, y), LiftedMatrix::rank_one(x0, y0)), 0.0);
  CMatrix e11 = CMatrix::Zero(2, 2), e22 = CMatrix::Zero(2, 2);
  e11(0, 0) = 1;
  e22(1, 1) = 1;
  EXPECT_NEAR(align_and_distance(LiftedMatrix(e11), LiftedMatrix(e22)), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(align_and_distance(LiftedMatrix(e11), LiftedMatrix(e11)), 0.0);
  EXPECT_THROW(align_and_distance(LiftedMatrix(e11), LiftedMatrix::zero(2, 3)), std::invalid_argument);
  EXPECT_NEAR(scaling_distance(Complex(0, 3) * e11, e11), 0.0, 1e-15);
}

TEST(SolveFixedSupport, LeastSquaresPathIsExact) {
  Rng rng(1);
  const auto sc = ConstraintScenario::subspace(9, 2, 3);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 1);
  const LiftedMatrix M0 = planted(2, 3, rng);
  const RecoveryResult res = solve_fixed_support(ens, apply_A(ens, M0), {iota(2), iota(3)}, 0, rng);
  EXPECT_LT(align_and_distance(res.estimate, M0), 1e-8);
  EXPECT_LT(res.residual, 1e-10);
}

TEST(SolveFixedSupport, ZeroMeasurementGivesZero) {
  Rng rng(2);
  const Ensemble ens = build_complex_ensemble(ConstraintScenario::subspace(5, 2, 2),
                                              EnsembleTag::complex_generic(), 2);
  const RecoveryResult res = solve_fixed_support(ens, CVector::Zero(5), {iota(2), iota(2)}, 3, rng);
  EXPECT_EQ(res.estimate.norm(), 0.0);
  EXPECT_EQ(res.residual, 0.0);
  EXPECT_THROW(solve_fixed_support(ens, CVector::Zero(5), {{}, iota(2)}, 0, rng),
               std::invalid_argument);
}

TEST(SolveFixedSupport, ReportedResidualIsReproducible) {
  Rng rng(3);
  const auto sc = ConstraintScenario::subspace(3, 2, 2);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 3);
  const CVector z = rng.complex_normal_vector(3);
  const RecoveryResult res = solve(ens, z, sc, 5, rng);
  EXPECT_NEAR((apply_A(ens, res.estimate) - z).norm(), res.residual, 1e-12);
  EXPECT_LE(res.restarts_used, 5);
}

TEST(Solve, SubspaceAlternatingMinimizationRecovers) {
  EXPECT_GE(success_rate(ConstraintScenario::subspace(5, 2, 2), EnsembleTag::complex_generic(),
                         100, 20, 1e-6),
            0.95);
}

TEST(Solve, SparsityEnumerationRecovers) {
  EXPECT_GE(success_rate(ConstraintScenario::sparsity(5, 4, 1, 4, 1),
                         EnsembleTag::complex_generic(), 100, 2, 1e-8),
            0.99);
}

TEST(Solve, MixedEnumerationRecovers) {
  EXPECT_GE(success_rate(ConstraintScenario::mixed(5, 4, 1, 2), EnsembleTag::complex_generic(),
                         100, 2, 1e-8),
            0.99);
}

TEST(Solve, RealEnsembleRecoversRealFactors) {
  const auto sc = ConstraintScenario::subspace(6, 2, 2);
  Rng rng(4);
  const Ensemble ens = build_ensemble(sc, EnsembleTag::real_generic(), 4);
  RVector x = rng.normal_vector(2), y = rng.normal_vector(2);
  const LiftedMatrix M0 = LiftedMatrix::rank_one(x.cast<Complex>(), y.cast<Complex>());
  const RecoveryResult res = solve(ens, apply_A(ens, M0), sc, 2, rng);
  EXPECT_LT(align_and_distance(res.estimate, M0), 1e-8 * M0.norm());
  EXPECT_LT(res.estimate.matrix().imag().norm(), 1e-12);
}

TEST(SolveSparse, ZeroMeasurementPicksFirstSupport) {
  Rng rng(5);
  const auto sc = ConstraintScenario::sparsity(5, 3, 1, 3, 1);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 5);
  const RecoveryResult res = solve_sparse_enumerate(ens, CVector::Zero(5), sc, 1, rng);
  ASSERT_TRUE(res.support.has_value());
  EXPECT_EQ(res.support->rows, std::vector<int>{0});
  EXPECT_EQ(res.support->cols, std::vector<int>{0});
  EXPECT_EQ(res.estimate.norm(), 0.0);
}

TEST(SolveSparse, EstimateVanishesOffSupport) {
  Rng rng(6);
  const auto sc = ConstraintScenario::sparsity(6, 4, 2, 3, 1);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 6);
  const RecoveryResult res = solve_sparse_enumerate(ens, rng.complex_normal_vector(6), sc, 1, rng);
  ASSERT_TRUE(res.support.has_value());
  for (Index i = 0; i < 4; ++i)
    for (Index k = 0; k < 3; ++k) {
      const bool on = std::count(res.support->rows.begin(), res.support->rows.end(), i) &&
                      std::count(res.support->cols.begin(), res.support->cols.end(), k);
      if (!on) EXPECT_EQ(res.estimate.matrix()(i, k), Complex(0, 0));
    }
}

TEST(SolveSparse, CapAndKindChecks) {
  Rng rng(7);
  const auto sc = ConstraintScenario::sparsity(10, 20, 5, 20, 5);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 7);
  EXPECT_THROW(solve_sparse_enumerate(ens, CVector::Zero(10), sc, 0, rng), std::length_error);
  const auto sub = ConstraintScenario::subspace(5, 2, 2);
  const Ensemble ens2 = build_complex_ensemble(sub, EnsembleTag::complex_generic(), 7);
  EXPECT_THROW(solve_sparse_enumerate(ens2, CVector::Zero(5), sub, 0, rng), std::invalid_argument);
  EXPECT_EQ(support_pair_count(ConstraintScenario::mixed(5, 4, 2, 3)), 6u);
  EXPECT_EQ(admissible_supports(ConstraintScenario::sparsity(5, 4, 2, 3, 2)).size(), 18u);
}

TEST(CertifyWeak, RankCertificateAtFullSampling) {
  Rng rng(8);
  const auto sc = ConstraintScenario::subspace(4, 2, 2);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 8);
  const auto v = certify_weak(ens, planted(2, 2, rng), sc, 10, 1e-8, rng);
  EXPECT_EQ(v.status, VerdictStatus::CertifiedUnique);
  EXPECT_GT(v.min_singular_value, 1e-8);
  EXPECT_TRUE(witness_is_valid(ens, v));
}

TEST(CertifyWeak, UndersampledHasCounterexample) {
  Rng rng(9);
  const auto sc = ConstraintScenario::subspace(2, 2, 2);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 9);
  const auto v = certify_weak(ens, planted(2, 2, rng), sc, 50, 1e-8, rng);
  ASSERT_EQ(v.status, VerdictStatus::CounterexampleFound);
  EXPECT_TRUE(witness_is_valid(ens, v));
}

TEST(CertifyWeak, AboveThresholdBelowFullSamplingIsHeuristic) {
  Rng rng(10);
  const auto sc = ConstraintScenario::subspace(7, 3, 3);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 10);
  const auto v = certify_weak(ens, planted(3, 3, rng), sc, 200, 1e-8, rng);
  EXPECT_EQ(v.status, VerdictStatus::HeuristicallyUnique);
  EXPECT_FALSE(v.witness.has_value());
}

TEST(CertifyWeak, RejectsZeroFactors) {
  Rng rng(11);
  const auto sc = ConstraintScenario::subspace(4, 2, 2);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 11);
  EXPECT_THROW(certify_weak(ens, LiftedMatrix::zero(2, 2), sc, 1, 1e-8, rng), std::invalid_argument);
}

TEST(CertifyStrong, RankCertificates) {
  Rng rng(12);
  for (int n : {4, 5, 6}) {
    const auto sc = ConstraintScenario::subspace(n, 2, 2);
    const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 12);
    EXPECT_EQ(certify_strong(ens, sc, 10, 1e-8, rng).status, VerdictStatus::CertifiedUnique) << n;
  }
  const auto sp = ConstraintScenario::sparsity(4, 3, 1, 3, 1);
  const Ensemble ens = build_complex_ensemble(sp, EnsembleTag::complex_generic(), 13);
  const auto v = certify_strong(ens, sp, 10, 1e-8, rng);
  EXPECT_EQ(v.status, VerdictStatus::CertifiedUnique);
  EXPECT_EQ(v.operators_checked, 36u);
}

TEST(CertifyStrong, SingleMeasurementHasCounterexample) {
  Rng rng(14);
  const auto sc = ConstraintScenario::subspace(1, 2, 2);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 14);
  const auto v = certify_strong(ens, sc, 20, 1e-8, rng);
  ASSERT_EQ(v.status, VerdictStatus::CounterexampleFound);
  ASSERT_TRUE(v.witness && v.reference);
  EXPECT_TRUE(witness_is_valid(ens, v));
  EXPECT_LE((apply_A(ens, *v.witness) - apply_A(ens, *v.reference)).norm(), v.tolerance);
  EXPECT_GT(scaling_distance(v.witness->matrix(), v.reference->matrix()), 10 * v.tolerance);
}

TEST(Verdict, TamperedWitnessIsRejected) {
  Rng rng(15);
  const auto sc = ConstraintScenario::subspace(1, 2, 2);
  const Ensemble ens = build_complex_ensemble(sc, EnsembleTag::complex_generic(), 15);
  auto v = certify_strong(ens, sc, 20, 1e-8, rng);
  ASSERT_EQ(v.status, VerdictStatus::CounterexampleFound);
  v.witness = *v.reference;
  EXPECT_FALSE(witness_is_valid(ens, v));
}

TEST(Solve, SuccessIsMonotoneInSampleCount) {
  const auto base = ConstraintScenario::subspace(2, 2, 2);
  double previous = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const double rate = success_rate(base.with_n(n), EnsembleTag::complex_generic(), 40, 10, 1e-6);
    // Two binomial standard errors of slack at 40 trials.
    EXPECT_GE(rate + 2 * std::sqrt(0.25 / 40), previous) << "n=" << n;
    previous = rate;
  }
}
