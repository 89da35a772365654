#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "blindid/bounds.hpp"
#include "blindid/ensembles.hpp"
#include "blindid/lifting.hpp"
#include "blindid/recovery.hpp"
#include "blindid/scenario.hpp"

// Seeded Monte-Carlo engines. Every trial draws from its own child stream
// trial_seed(master, row, trial), and results are reduced in index order, so
// outputs are identical for any worker count.

namespace blindid {

/// splitmix-based seed of trial `trial` in sweep row `row`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t row, std::size_t trial) noexcept;

struct SmallBallEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;  ///< binomial sqrt(p(1-p)/trials)
  std::size_t hits = 0;
  std::size_t trials = 0;
};

/// Frequency of |a^H M conj(b)| <= rho with a, b uniform on radius-R complex
/// balls. Throws for zero M or fewer than 1000 trials.
SmallBallEstimate estimate_small_ball_prob(const CMatrix& M, double R, double rho,
                                           std::size_t trials, std::uint64_t seed,
                                           unsigned threads = 1);

/// Exact P[|a b| <= rho] for scalars a, b uniform on the unit disk:
/// rho^2 (1 + 2 ln(1/rho)) for rho < 1, else 1.
double exact_scalar_small_ball(double rho);

struct SmallBallRow {
  double rho = 0.0;
  SmallBallEstimate estimate;
  double bound = 0.0;  ///< rho^2 g with ell = L = ||M||_2
};

std::vector<SmallBallRow> run_small_ball_sweep(const CMatrix& M, double R,
                                               const std::vector<double>& rhos,
                                               std::size_t trials, std::uint64_t seed,
                                               unsigned threads = 1);

struct MeanIsometryResult {
  CMatrix average;           ///< (1/T) sum_t G_t^* G_t (M)
  double relative_error = 0;  ///< ||average - M||_F / ||M||_F
  double radius = 0;
  int trials = 0;
};

/// Averages G^*G(M) over `trials` ComplexUniformBall ensembles of radius R.
MeanIsometryResult estimate_mean_isometry(int n, int m1, int m2, double R, const CMatrix& M,
                                          int trials, std::uint64_t seed, unsigned threads = 1);

struct TrialPlan {
  ConstraintScenario scenario;
  EnsembleTag tag = EnsembleTag::complex_generic();
  int trials = 100;
  int restarts = 20;
  /// ||e||_2 of the time-domain noise; e is uniform on that sphere.
  double noise_level = 0.0;
  std::uint64_t master_seed = 0;
  /// n values (transition) or delta values (stability).
  std::vector<double> sweep;
  StabilityMode mode = StabilityMode::SinglePoint;
  unsigned threads = 1;
  SolverOptions solver;
};

struct SweepRow {
  double value = 0.0;  ///< swept n or delta
  int trials = 0;
  int successes = 0;   ///< recovered (transition) / no violation found (stability)
  double rate = 0.0;   ///< successes / trials
  double reference = 0.0;      ///< d (transition) / eps(delta) (stability)
  double reference_aux = 0.0;  ///< 2d (transition) / clamped failure bound (stability)
  double mean_lifted_error = 0.0;
  double max_lifted_error = 0.0;
};

/// For each n in plan.sweep: draw ensemble and planted unit-norm M0 per trial,
/// add optional noise, solve, and count ||M_hat - M0||_F <= recovery_threshold.
std::vector<SweepRow> run_phase_transition(const TrialPlan& plan);

/// For each delta in plan.sweep: draw a ComplexUniformBall ensemble and planted
/// M0 in the unit-ball constraint set per trial, then search for M in the same
/// set with ||G(M) - G(M0)|| <= delta and ||M - M0||_F as large as possible.
/// A trial violates when the largest distance found exceeds
/// max(eps(delta), recovery_threshold). The search (noisy solve, tangent-curve
/// probe, random restarts) only ever finds lower bounds on the worst case.
std::vector<SweepRow> run_stability_sweep(const TrialPlan& plan);

/// Least-squares slope of log(y) against log(x) over entries with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace blindid
