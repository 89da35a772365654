#pragma once

#include <optional>

#include "blindid/ensembles.hpp"
#include "blindid/lifting.hpp"
#include "blindid/scenario.hpp"
#include "blindid/types.hpp"

// Closed-form sample complexities, covering numbers, small-ball functions and
// stability probabilities. All logarithms are natural.

namespace blindid {

/// d = m1+m2 (subspace), s1+m2 (mixed), s1+s2 (sparsity).
int sample_complexity_d(const ConstraintScenario& sc);

/// Upper bound 2d on the Minkowski dimension of the lifted constraint set.
int minkowski_dim_upper(const ConstraintScenario& sc);

/// pi^m R^{2m} / m!, with V_{C^0} = 1. Throws for R <= 0 or m < 0.
double volume_complex_ball(int m, double R);
double log_volume_complex_ball(int m, double R);
/// pi^{m/2} R^m / Gamma(m/2 + 1), with V_{R^0} = 1.
double volume_real_ball(int m, double R);
double log_volume_real_ball(int m, double R);

/// log binom(m, k) through lgamma.
double log_binomial(int m, int k);

enum class CoverKind { Ball, SparseBall };

/// (3/rho)^m for the unit ball of R^m; binom(m,s) (3/rho)^s for the union of
/// unit balls in s-sparse coordinate subspaces. Evaluated in log space.
double covering_bound(CoverKind kind, int m, std::optional<int> s, double rho);

/// f(rho, ell, L, R) for real balls:
/// 4 V_{R^{m1-1}} V_{R^{m2-1}} / (ell V_{R^{m1}} V_{R^{m2}}) (1 + ln(L R^2 / rho)).
double small_ball_f(double rho, double ell, double L, double R, int m1, int m2);

/// g(rho, ell, L, R) for complex balls:
/// pi^2 V_{C^{m1-1}} V_{C^{m2-1}} / (ell^2 V_{C^{m1}} V_{C^{m2}}) (1 + 2 ln(L R^2 / rho)).
double small_ball_g(double rho, double ell, double L, double R, int m1, int m2);

/// rho f (real) or rho^2 g (complex); bounds P[|a^* M conj(b)| <= rho] for
/// ell <= ||M||_2 <= L. Throws on nonpositive inputs or ell > L.
double small_ball_bound(Field field, double rho, double ell, double L, double R, int m1, int m2);

/// C = 648 m1 m2 (1 + 2 ln(2 sqrt(n) R^2 / (3 delta))); may be negative for
/// large delta and is returned as-is.
double constant_C(int n, int m1, int m2, double R, double delta);

enum class StabilityMode { SinglePoint, Uniform };

/// Signed stability constant in log form: value = sign * exp(log_abs).
struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
  double value() const;
};

/// C' = mult' C^n / n^{n-d} (single point) or C'' = mult'' (4C)^n / n^{n-2d}
/// (uniform), with mult' = binom(m1,s1)^2 [binom(m2,s2)^2] and
/// mult'' = binom(m1,s1)^4 [binom(m2,s2)^4] for the sparse kinds.
SignedLog stability_constant(const ConstraintScenario& sc, StabilityMode mode, double R,
                             double delta);

struct FailureBound {
  double raw = 0.0;      ///< unclamped, may exceed 1 or overflow to inf
  double clamped = 0.0;  ///< min(1, max(0, raw))
  double log_raw = 0.0;  ///< log of raw when raw > 0, -inf when raw == 0
};

/// C' (delta^2/R^4)^{n-d} (1/eps^2)^n, or C'' (delta^2/R^4)^{n-2d} (1/eps^2)^n.
/// delta == 0 is the limit (raw = 0). Throws std::domain_error when n <= d
/// (single point) or n <= 2d (uniform).
FailureBound failure_prob_bound(const ConstraintScenario& sc, StabilityMode mode, double R,
                                double delta, double epsilon);

/// Frequency-domain single-point subspace bound stated in terms of
/// ||A(M) - A(M0)|| <= delta_a:
/// (648 m1 m2 (1 + 2 ln(2 R^2/(3 delta_a))))^n (delta_a^2/R^4)^{n-m1-m2} eps^{-2n}.
/// Equals failure_prob_bound(SinglePoint) at delta = sqrt(n) * delta_a.
FailureBound frequency_domain_failure_bound(int n, int m1, int m2, double R, double delta_a,
                                            double epsilon);

/// eps(delta) = C'^{1/(2n)} (delta/R^2)^{alpha/2}, alpha = 1 - d/n (single point)
/// eps(delta) = 2 C''^{1/(2n)} (delta/R^2)^beta, beta = 1 - 2d/n (uniform).
/// `c_value` is C' or C'' respectively; throws for c_value <= 0 or when the
/// mode's sample-complexity condition fails.
double epsilon_of_delta(const ConstraintScenario& sc, StabilityMode mode, double R,
                        double delta, double c_value);
/// Same with log(C') / log(C'') supplied, for constants beyond double range.
double epsilon_of_delta_log(const ConstraintScenario& sc, StabilityMode mode, double R,
                            double delta, double log_c_value);

/// eps(delta) with the constant evaluated at the same (R, delta).
double stability_epsilon(const ConstraintScenario& sc, StabilityMode mode, double R,
                         double delta);

struct SnrMetrics {
  double rsnr = 0.0;  ///< ||M0||^2 / ||M - M0||^2 (Frobenius), +inf when M == M0
  double msnr = 0.0;  ///< ||G(M0)||^2 / ||G(M) - G(M0)||^2
};

SnrMetrics snr_metrics(const LiftedMatrix& M0, const LiftedMatrix& M, const Ensemble& ens);

struct BoundQuery {
  ConstraintScenario scenario;
  double delta = 0.1;
  double epsilon = 1.0;
  double R = 1.0;
  double rho = 0.1;
  double ell = 1.0;
  double L = 1.0;
  double sigma = 1.0;

  /// Throws ScenarioError / std::invalid_argument.
  void validate() const;
};

struct BoundReport {
  int d = 0;
  int minkowski_dim_upper = 0;
  double C = 0.0;
  double C_prime = 0.0;
  double log_C_prime = 0.0;
  std::optional<double> C_dblprime;
  std::optional<double> log_C_dblprime;
  double alpha = 0.0;
  std::optional<double> beta;
  std::optional<FailureBound> weak_failure_bound;
  std::optional<FailureBound> uniform_failure_bound;
  std::optional<double> epsilon_single_point;
  std::optional<double> epsilon_uniform;
  /// sigma * eps(delta / sigma): single-point radius on the sigma-scaled ball.
  std::optional<double> epsilon_single_point_scaled;
  double small_ball_complex = 0.0;
  double small_ball_real = 0.0;
  double covering_x = 0.0;
  double covering_y = 0.0;
  double volume_complex_m1 = 0.0;
  double volume_complex_m2 = 0.0;
};

/// Evaluates every closed-form quantity for a query. Stability entries whose
/// sample-complexity condition fails are left empty.
BoundReport evaluate_bounds(const BoundQuery& query);

}  // namespace blindid
