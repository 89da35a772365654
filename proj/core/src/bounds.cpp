#include "blindid/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blindid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

double log_sparse_multiplier(const ConstraintScenario& sc, int power) {
  double out = 0.0;
  if (sc.kind != ScenarioKind::Subspace) out += power * log_binomial(sc.m1, *sc.s1);
  if (sc.kind == ScenarioKind::Sparsity) out += power * log_binomial(sc.m2, *sc.s2);
  return out;
}

int effective_d(const ConstraintScenario& sc, StabilityMode mode) {
  const int d = sample_complexity_d(sc);
  return mode == StabilityMode::SinglePoint ? d : 2 * d;
}

void require_sample_complexity(const ConstraintScenario& sc, StabilityMode mode) {
  const int d = sample_complexity_d(sc);
  if (mode == StabilityMode::SinglePoint && sc.n <= d)
    throw std::domain_error("single-point stability bound requires n > d (n = " +
                            std::to_string(sc.n) + ", d = " + std::to_string(d) + ")");
  if (mode == StabilityMode::Uniform && sc.n <= 2 * d)
    throw std::domain_error("uniform stability bound requires n > 2d (n = " +
                            std::to_string(sc.n) + ", 2d = " + std::to_string(2 * d) + ")");
}

FailureBound from_signed_log(double log_abs, int sign) {
  FailureBound out;
  if (log_abs == -kInf) {
    out.raw = 0.0;
    out.log_raw = -kInf;
  } else {
    out.raw = sign * std::exp(log_abs);
    out.log_raw = sign > 0 ? log_abs : std::numeric_limits<double>::quiet_NaN();
  }
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

}  // namespace

int sample_complexity_d(const ConstraintScenario& sc) {
  sc.validate(Validation::Structural);
  switch (sc.kind) {
    case ScenarioKind::Subspace: return sc.m1 + sc.m2;
    case ScenarioKind::Mixed: return *sc.s1 + sc.m2;
    case ScenarioKind::Sparsity: return *sc.s1 + *sc.s2;
  }
  return 0;
}

int minkowski_dim_upper(const ConstraintScenario& sc) { return 2 * sample_complexity_d(sc); }

double log_volume_complex_ball(int m, double R) {
  if (m < 0) throw std::invalid_argument("ball dimension must be >= 0");
  require_positive(R, "R");
  if (m == 0) return 0.0;
  return m * std::log(std::numbers::pi) + 2.0 * m * std::log(R) - std::lgamma(m + 1.0);
}

double volume_complex_ball(int m, double R) { return std::exp(log_volume_complex_ball(m, R)); }

double log_volume_real_ball(int m, double R) {
  if (m < 0) throw std::invalid_argument("ball dimension must be >= 0");
  require_positive(R, "R");
  if (m == 0) return 0.0;
  return 0.5 * m * std::log(std::numbers::pi) + m * std::log(R) - std::lgamma(0.5 * m + 1.0);
}

double volume_real_ball(int m, double R) { return std::exp(log_volume_real_ball(m, R)); }

double log_binomial(int m, int k) {
  if (k < 0 || k > m) throw std::invalid_argument("log_binomial requires 0 <= k <= m");
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

double covering_bound(CoverKind kind, int m, std::optional<int> s, double rho) {
  require_positive(rho, "rho");
  if (m < 1) throw std::invalid_argument("covering dimension must be >= 1");
  if (kind == CoverKind::Ball) return std::pow(3.0 / rho, m);
  if (!s) throw std::invalid_argument("sparse covering bound needs s");
  if (*s < 0 || *s > m) throw std::invalid_argument("sparse covering bound requires s <= m");
  const std::size_t count = binomial(m, *s);
  if (count < (std::size_t{1} << 53)) return static_cast<double>(count) * std::pow(3.0 / rho, *s);
  return std::exp(log_binomial(m, *s) + *s * std::log(3.0 / rho));
}

double small_ball_f(double rho, double ell, double L, double R, int m1, int m2) {
  const double log_ratio = log_volume_real_ball(m1 - 1, R) + log_volume_real_ball(m2 - 1, R) -
                           log_volume_real_ball(m1, R) - log_volume_real_ball(m2, R);
  return 4.0 * std::exp(log_ratio) / ell * (1.0 + std::log(L * R * R / rho));
}

double small_ball_g(double rho, double ell, double L, double R, int m1, int m2) {
  const double log_ratio = log_volume_complex_ball(m1 - 1, R) +
                           log_volume_complex_ball(m2 - 1, R) - log_volume_complex_ball(m1, R) -
                           log_volume_complex_ball(m2, R);
  return std::numbers::pi * std::numbers::pi * std::exp(log_ratio) / (ell * ell) *
         (1.0 + 2.0 * std::log(L * R * R / rho));
}

double small_ball_bound(Field field, double rho, double ell, double L, double R, int m1, int m2) {
  require_positive(rho, "rho");
  require_positive(ell, "ell");
  require_positive(L, "L");
  require_positive(R, "R");
  if (m1 < 1 || m2 < 1) throw std::invalid_argument("m1, m2 must be >= 1");
  if (ell > L) throw std::invalid_argument("ell must not exceed L");
  return field == Field::Real ? rho * small_ball_f(rho, ell, L, R, m1, m2)
                              : rho * rho * small_ball_g(rho, ell, L, R, m1, m2);
}

double constant_C(int n, int m1, int m2, double R, double delta) {
  if (n < 1 || m1 < 1 || m2 < 1) throw std::invalid_argument("dimensions must be positive");
  require_positive(R, "R");
  require_positive(delta, "delta");
  const double arg = 2.0 * std::sqrt(static_cast<double>(n)) * R * R / (3.0 * delta);
  return 648.0 * m1 * m2 * (1.0 + 2.0 * std::log(arg));
}

double SignedLog::value() const { return log_abs == -kInf ? 0.0 : sign * std::exp(log_abs); }

SignedLog stability_constant(const ConstraintScenario& sc, StabilityMode mode, double R,
                             double delta) {
  const double C = constant_C(sc.n, sc.m1, sc.m2, R, delta);
  const int n = sc.n;
  SignedLog out;
  if (C == 0.0) {
    out.log_abs = -kInf;
    return out;
  }
  out.sign = (C < 0.0 && n % 2 == 1) ? -1 : 1;
  const double base = mode == StabilityMode::SinglePoint ? std::abs(C) : 4.0 * std::abs(C);
  const int power = mode == StabilityMode::SinglePoint ? 2 : 4;
  out.log_abs = log_sparse_multiplier(sc, power) + n * std::log(base) -
                (n - effective_d(sc, mode)) * std::log(static_cast<double>(n));
  return out;
}

FailureBound failure_prob_bound(const ConstraintScenario& sc, StabilityMode mode, double R,
                                double delta, double epsilon) {
  sc.validate(Validation::Structural);
  require_sample_complexity(sc, mode);
  require_positive(R, "R");
  require_positive(epsilon, "epsilon");
  if (delta < 0.0 || !std::isfinite(delta))
    throw std::invalid_argument("delta must be nonnegative and finite");
  if (delta == 0.0) return from_signed_log(-kInf, 1);
  const SignedLog c = stability_constant(sc, mode, R, delta);
  if (c.log_abs == -kInf) return from_signed_log(-kInf, 1);
  const int n = sc.n;
  const double log_abs = c.log_abs +
                         (n - effective_d(sc, mode)) * std::log(delta * delta / (R * R * R * R)) -
                         2.0 * n * std::log(epsilon);
  return from_signed_log(log_abs, c.sign);
}

FailureBound frequency_domain_failure_bound(int n, int m1, int m2, double R, double delta_a,
                                            double epsilon) {
  if (n <= m1 + m2) throw std::domain_error("frequency-domain bound requires n > m1 + m2");
  require_positive(R, "R");
  require_positive(epsilon, "epsilon");
  if (delta_a < 0.0) throw std::invalid_argument("delta must be nonnegative");
  if (delta_a == 0.0) return from_signed_log(-kInf, 1);
  const double Ca = 648.0 * m1 * m2 * (1.0 + 2.0 * std::log(2.0 * R * R / (3.0 * delta_a)));
  if (Ca == 0.0) return from_signed_log(-kInf, 1);
  const int sign = (Ca < 0.0 && n % 2 == 1) ? -1 : 1;
  const double log_abs = n * std::log(std::abs(Ca)) +
                         (n - m1 - m2) * std::log(delta_a * delta_a / (R * R * R * R)) -
                         2.0 * n * std::log(epsilon);
  return from_signed_log(log_abs, sign);
}

double epsilon_of_delta_log(const ConstraintScenario& sc, StabilityMode mode, double R,
                            double delta, double log_c_value) {
  sc.validate(Validation::Structural);
  require_sample_complexity(sc, mode);
  require_positive(R, "R");
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  if (delta == 0.0) return 0.0;
  const double n = sc.n;
  const double d = sample_complexity_d(sc);
  const double log_base = std::log(delta / (R * R));
  if (mode == StabilityMode::SinglePoint) {
    const double alpha = 1.0 - d / n;
    return std::exp(log_c_value / (2.0 * n) + 0.5 * alpha * log_base);
  }
  const double beta = 1.0 - 2.0 * d / n;
  return 2.0 * std::exp(log_c_value / (2.0 * n) + beta * log_base);
}

double epsilon_of_delta(const ConstraintScenario& sc, StabilityMode mode, double R, double delta,
                        double c_value) {
  require_positive(c_value, "stability constant");
  return epsilon_of_delta_log(sc, mode, R, delta, std::log(c_value));
}

double stability_epsilon(const ConstraintScenario& sc, StabilityMode mode, double R,
                         double delta) {
  if (delta == 0.0) {
    require_sample_complexity(sc, mode);
    return 0.0;
  }
  const SignedLog c = stability_constant(sc, mode, R, delta);
  if (c.sign < 0 || c.log_abs == -kInf)
    throw std::domain_error("stability constant is not positive at this delta");
  return epsilon_of_delta_log(sc, mode, R, delta, c.log_abs);
}

SnrMetrics snr_metrics(const LiftedMatrix& M0, const LiftedMatrix& M, const Ensemble& ens) {
  SnrMetrics out;
  const double err = (M.matrix() - M0.matrix()).squaredNorm();
  const CVector g0 = apply_G(ens, M0);
  const double meas_err = (apply_G(ens, M) - g0).squaredNorm();
  out.rsnr = err == 0.0 ? kInf : M0.matrix().squaredNorm() / err;
  out.msnr = meas_err == 0.0 ? kInf : g0.squaredNorm() / meas_err;
  return out;
}

void BoundQuery::validate() const {
  scenario.validate(Validation::Strict);
  require_positive(delta, "delta");
  require_positive(epsilon, "epsilon");
  require_positive(R, "R");
  require_positive(rho, "rho");
  require_positive(ell, "ell");
  require_positive(L, "L");
  require_positive(sigma, "sigma");
  if (ell > L) throw std::invalid_argument("ell must not exceed L");
}

BoundReport evaluate_bounds(const BoundQuery& q) {
  q.validate();
  const ConstraintScenario& sc = q.scenario;
  BoundReport r;
  r.d = sample_complexity_d(sc);
  r.minkowski_dim_upper = minkowski_dim_upper(sc);
  r.C = constant_C(sc.n, sc.m1, sc.m2, q.R, q.delta);
  const SignedLog cp = stability_constant(sc, StabilityMode::SinglePoint, q.R, q.delta);
  r.C_prime = cp.value();
  r.log_C_prime = cp.log_abs;
  r.alpha = 1.0 - static_cast<double>(r.d) / sc.n;
  if (sc.n > 2 * r.d) {
    const SignedLog cpp = stability_constant(sc, StabilityMode::Uniform, q.R, q.delta);
    r.C_dblprime = cpp.value();
    r.log_C_dblprime = cpp.log_abs;
    r.beta = 1.0 - 2.0 * r.d / sc.n;
    r.uniform_failure_bound =
        failure_prob_bound(sc, StabilityMode::Uniform, q.R, q.delta, q.epsilon);
    if (cpp.sign > 0) r.epsilon_uniform = stability_epsilon(sc, StabilityMode::Uniform, q.R, q.delta);
  }
  if (sc.n > r.d) {
    r.weak_failure_bound =
        failure_prob_bound(sc, StabilityMode::SinglePoint, q.R, q.delta, q.epsilon);
    if (cp.sign > 0) {
      r.epsilon_single_point = stability_epsilon(sc, StabilityMode::SinglePoint, q.R, q.delta);
      const SignedLog scaled =
          stability_constant(sc, StabilityMode::SinglePoint, q.R, q.delta / q.sigma);
      if (scaled.sign > 0)
        r.epsilon_single_point_scaled =
            q.sigma * stability_epsilon(sc, StabilityMode::SinglePoint, q.R, q.delta / q.sigma);
    }
  }
  r.small_ball_complex = small_ball_bound(Field::Complex, q.rho, q.ell, q.L, q.R, sc.m1, sc.m2);
  r.small_ball_real = small_ball_bound(Field::Real, q.rho, q.ell, q.L, q.R, sc.m1, sc.m2);
  r.covering_x = sc.s1 ? covering_bound(CoverKind::SparseBall, sc.m1, sc.s1, q.rho)
                       : covering_bound(CoverKind::Ball, sc.m1, std::nullopt, q.rho);
  r.covering_y = sc.s2 ? covering_bound(CoverKind::SparseBall, sc.m2, sc.s2, q.rho)
                       : covering_bound(CoverKind::Ball, sc.m2, std::nullopt, q.rho);
  r.volume_complex_m1 = volume_complex_ball(sc.m1, q.R);
  r.volume_complex_m2 = volume_complex_ball(sc.m2, q.R);
  return r;
}

}  // namespace blindid
