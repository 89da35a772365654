#include <cmath>

#include <gtest/gtest.h>

#include "blindid/mc.hpp"

using namespace blindid;

namespace {

bool same_rows(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].value != b[i].value || a[i].successes != b[i].successes ||
        a[i].mean_lifted_error != b[i].mean_lifted_error ||
        a[i].max_lifted_error != b[i].max_lifted_error || a[i].reference != b[i].reference ||
        a[i].reference_aux != b[i].reference_aux)
      return false;
  }
  return true;
}

}  // namespace

TEST(TrialSeed, DeterministicAndDistinct) {
  EXPECT_EQ(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(1, 2, 4));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(1, 3, 3));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(2, 2, 3));
}

TEST(SmallBall, ScalarCaseMatchesClosedForm) {
  const CMatrix M = CMatrix::Ones(1, 1);
  for (double rho : {0.05, 0.1, 0.2}) {
    const auto est = estimate_small_ball_prob(M, 1.0, rho, 100000, 42);
    EXPECT_NEAR(est.p_hat, exact_scalar_small_ball(rho), 3 * est.std_err) << rho;
  }
  EXPECT_NEAR(exact_scalar_small_ball(0.1), 0.056051701859880926, 1e-15);
}

TEST(SmallBall, ClosedFormAgreesWithNumericalIntegral) {
  // P[|a||b| <= rho] with |a|^2, |b|^2 ~ U(0,1): integrate P[v <= rho^2/u] du.
  const double rho = 0.3;
  const int N = 200000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    const double u = (i + 0.5) / N;
    sum += std::min(1.0, rho * rho / u);
  }
  EXPECT_NEAR(sum / N, exact_scalar_small_ball(rho), 1e-6);
}

TEST(SmallBall, EventAlwaysHoldsAtUnitRadius) {
  const auto est = estimate_small_ball_prob(CMatrix::Ones(1, 1), 1.0, 1.0, 1000, 1);
  EXPECT_EQ(est.p_hat, 1.0);
  EXPECT_EQ(est.hits, 1000u);
}

TEST(SmallBall, RejectsBadInputs) {
  EXPECT_THROW(estimate_small_ball_prob(CMatrix::Zero(2, 2), 1.0, 0.1, 1000, 1), std::invalid_argument);
  EXPECT_THROW(estimate_small_ball_prob(CMatrix::Ones(2, 2), 1.0, 0.1, 999, 1), std::invalid_argument);
}

TEST(SmallBall, RandomMatricesStayBelowBound) {
  Rng rng(7);
  for (int t = 0; t < 6; ++t) {
    const int m1 = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m2 = 1 + static_cast<int>(rng.next_u64() % 3);
    CMatrix M(m1, m2);
    for (Index k = 0; k < m2; ++k)
      for (Index i = 0; i < m1; ++i) M(i, k) = rng.complex_normal();
    const auto rows = run_small_ball_sweep(M, 1.0, {0.05, 0.1, 0.2}, 20000, rng.next_u64());
    for (const auto& r : rows) EXPECT_LE(r.estimate.p_hat, r.bound + 3 * r.estimate.std_err);
  }
}

TEST(SmallBall, IndependentOfWorkerCount) {
  CMatrix M = CMatrix::Ones(2, 3);
  const auto a = estimate_small_ball_prob(M, 1.0, 0.1, 5000, 9, 1);
  const auto b = estimate_small_ball_prob(M, 1.0, 0.1, 5000, 9, 4);
  EXPECT_EQ(a.hits, b.hits);
}

TEST(MeanIsometry, IndependentOfWorkerCount) {
  const CMatrix M = CMatrix::Identity(2, 2);
  const auto a = estimate_mean_isometry(6, 2, 2, 0.8, M, 300, 5, 1);
  const auto b = estimate_mean_isometry(6, 2, 2, 0.8, M, 300, 5, 3);
  EXPECT_EQ(a.average, b.average);
}

TEST(PhaseTransition, SubspaceThreshold) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(2, 2, 2);
  plan.trials = 60;
  plan.restarts = 20;
  plan.master_seed = 3;
  plan.sweep = {2, 5, 6};
  const auto rows = run_phase_transition(plan);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[0].rate, 0.5);
  EXPECT_GE(rows[1].rate, 0.99);
  EXPECT_GE(rows[2].rate, 0.99);
  EXPECT_EQ(rows[0].reference, 4);
  EXPECT_EQ(rows[0].reference_aux, 8);
  for (const auto& r : rows) {
    EXPECT_GE(r.successes, 0);
    EXPECT_LE(r.successes, r.trials);
  }
}

TEST(PhaseTransition, NoiseBreaksExactRecovery) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(6, 2, 2);
  plan.trials = 20;
  plan.noise_level = 1e-2;
  plan.sweep = {6};
  const auto rows = run_phase_transition(plan);
  EXPECT_EQ(rows[0].successes, 0);
  EXPECT_LT(rows[0].mean_lifted_error, 0.5);
}

TEST(PhaseTransition, RejectsBadPlans) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(2, 2, 2);
  plan.sweep = {2.5};
  EXPECT_THROW(run_phase_transition(plan), std::invalid_argument);
  plan.sweep = {3};
  plan.trials = 0;
  EXPECT_THROW(run_phase_transition(plan), std::invalid_argument);
  plan.trials = 1;
  plan.sweep = {};
  EXPECT_TRUE(run_phase_transition(plan).empty());
}

TEST(PhaseTransition, PropagatesEnumerationCap) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::sparsity(10, 12, 4, 12, 4);
  plan.trials = 1;
  plan.sweep = {10};
  plan.solver.enumeration_cap = 1000;
  EXPECT_THROW(run_phase_transition(plan), std::length_error);
}

TEST(PhaseTransition, IndependentOfWorkerCount) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(3, 2, 2);
  plan.trials = 24;
  plan.restarts = 4;
  plan.master_seed = 77;
  plan.sweep = {2, 3, 4};
  const auto serial = run_phase_transition(plan);
  plan.threads = 4;
  EXPECT_TRUE(same_rows(serial, run_phase_transition(plan)));
}

TEST(Stability, ZeroDeltaHasNoViolations) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(10, 2, 2);
  plan.tag = EnsembleTag{EnsembleTag::Kind::ComplexUniformBall, std::nullopt};
  plan.trials = 30;
  plan.restarts = 2;
  plan.sweep = {0.0, 0.1};
  const auto rows = run_stability_sweep(plan);
  EXPECT_EQ(rows[0].successes, rows[0].trials);
  EXPECT_EQ(rows[0].reference, 0.0);
  EXPECT_EQ(rows[0].reference_aux, 0.0);
  EXPECT_LT(rows[0].max_lifted_error, 1e-6);
  EXPECT_GT(rows[1].max_lifted_error, 0.0);
  EXPECT_LE(rows[1].reference_aux, 1.0);
}

TEST(Stability, Preconditions) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(4, 2, 2);
  plan.tag = EnsembleTag::complex_uniform_ball(1.0);
  plan.sweep = {0.1};
  EXPECT_THROW(run_stability_sweep(plan), std::domain_error);
  plan.scenario = ConstraintScenario::subspace(8, 2, 2);
  plan.mode = StabilityMode::Uniform;
  EXPECT_THROW(run_stability_sweep(plan), std::domain_error);
  plan.mode = StabilityMode::SinglePoint;
  plan.tag = EnsembleTag::complex_generic();
  EXPECT_THROW(run_stability_sweep(plan), std::invalid_argument);
}

TEST(Stability, IndependentOfWorkerCount) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(10, 2, 2);
  plan.tag = EnsembleTag::complex_uniform_ball(0.6);
  plan.trials = 16;
  plan.restarts = 1;
  plan.master_seed = 5;
  plan.sweep = {0.1, 0.01};
  const auto serial = run_stability_sweep(plan);
  plan.threads = 3;
  EXPECT_TRUE(same_rows(serial, run_stability_sweep(plan)));
}

TEST(Stability, WorstErrorScalesWithDelta) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(10, 2, 2);
  plan.tag = EnsembleTag{EnsembleTag::Kind::ComplexUniformBall, std::nullopt};
  plan.trials = 100;
  plan.restarts = 2;
  plan.master_seed = 12;
  plan.sweep = {0.3, 0.1, 0.03};
  const auto rows = run_stability_sweep(plan);
  std::vector<double> deltas, worst;
  for (const auto& r : rows) {
    deltas.push_back(r.value);
    worst.push_back(r.max_lifted_error);
    EXPECT_EQ(r.successes, r.trials);
  }
  const double alpha = 1.0 - 4.0 / 10.0;
  EXPECT_GE(loglog_slope(deltas, worst), alpha / 2 - 0.15);
}

TEST(LogLogSlope, RecoversPowerLaw) {
  EXPECT_NEAR(loglog_slope({0.01, 0.1, 1.0}, {0.0001, 0.01, 1.0}), 2.0, 1e-12);
  EXPECT_NEAR(loglog_slope({0, 1, 2, 4}, {5, 3, 6, 12}), 1.0, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), std::invalid_argument);
}
