#include "blindid/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "blindid/parallel.hpp"

namespace blindid {
namespace {

// Trials are grouped into fixed-size chunks, each with its own stream; the
// chunking depends only on the trial count, never on the worker count.
constexpr std::size_t kChunk = 1024;

std::size_t chunk_count(std::size_t trials) { return (trials + kChunk - 1) / kChunk; }

double spectral_norm(const CMatrix& M) {
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

std::vector<int> random_subset(int m, int k, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const auto span = static_cast<std::uint64_t>(m - i);
    const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.next_u64() % span);
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

CVector random_sparse(int m, int s, Field field, Rng& rng) {
  CVector v = CVector::Zero(m);
  for (int i : random_subset(m, s, rng))
    v(i) = field == Field::Real ? Complex(rng.normal(), 0.0) : rng.complex_normal();
  return v;
}

// Planted x0 y0^T in the constraint set with ||x0 y0^T||_F = 1.
LiftedMatrix planted_truth(const ConstraintScenario& sc, Field field, Rng& rng) {
  CVector x = random_sparse(sc.m1, sc.x_support_size(), field, rng);
  CVector y = random_sparse(sc.m2, sc.y_support_size(), field, rng);
  while (x.norm() == 0.0) x = random_sparse(sc.m1, sc.x_support_size(), field, rng);
  while (y.norm() == 0.0) y = random_sparse(sc.m2, sc.y_support_size(), field, rng);
  return LiftedMatrix::rank_one(x / x.norm(), y / y.norm());
}

CVector noise_vector(int n, double radius, Field field, Rng& rng) {
  if (radius == 0.0) return CVector::Zero(n);
  if (field == Field::Complex) return sample_complex_sphere(n, radius, rng);
  RVector g = rng.normal_vector(n);
  while (g.norm() == 0.0) g = rng.normal_vector(n);
  return (g * (radius / g.norm())).cast<Complex>();
}

std::vector<int> nonzero_index(const CVector& v) {
  std::vector<int> out;
  for (Index i = 0; i < v.size(); ++i)
    if (v(i) != Complex(0.0, 0.0)) out.push_back(static_cast<int>(i));
  return out;
}

CMatrix rank_one_part(const CMatrix& X) {
  Eigen::JacobiSVD<CMatrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.singularValues()(0) * svd.matrixU().col(0) * svd.matrixV().col(0).adjoint();
}

struct StabilityProbe {
  const Ensemble& ens;
  const LiftedMatrix& M0;
  CVector g0;
  double delta;
  double best = 0.0;

  static constexpr double kSlack = 1e-9;

  // Maps a candidate into the unit ball and keeps its distance when it is
  // delta-close to M0 in measurement space. Returns feasibility.
  bool consider(CMatrix M) {
    if (!M.allFinite()) return false;
    const double nm = M.norm();
    if (nm > 1.0) M /= nm;
    if ((apply_G(ens, M) - g0).norm() > delta + kSlack) return false;
    best = std::max(best, (M - M0.matrix()).norm());
    return true;
  }
};

// Walks the rank-one curve M(t) = P_1(M0 + t T) along the tangent direction T
// least seen by A and keeps the farthest delta-feasible point.
void tangent_probe(StabilityProbe& probe) {
  if (probe.delta == 0.0 || !probe.M0.has_factors()) return;
  const Ensemble& ens = probe.ens;
  const std::vector<int> rows = nonzero_index(probe.M0.x());
  const std::vector<int> cols = nonzero_index(probe.M0.y());
  const Index p = static_cast<Index>(rows.size());
  const Index q = static_cast<Index>(cols.size());
  CVector x0(p), y0(q);
  for (Index i = 0; i < p; ++i) x0(i) = probe.M0.x()(rows[static_cast<std::size_t>(i)]);
  for (Index k = 0; k < q; ++k) y0(k) = probe.M0.y()(cols[static_cast<std::size_t>(k)]);

  CMatrix J(p * q, p + q);
  for (Index i = 0; i < p; ++i) {
    CMatrix E = CMatrix::Zero(p, q);
    E.row(i) = y0.transpose();
    J.col(i) = E.reshaped();
  }
  for (Index k = 0; k < q; ++k) {
    CMatrix E = CMatrix::Zero(p, q);
    E.col(k) = x0;
    J.col(p + k) = E.reshaped();
  }
  Eigen::JacobiSVD<CMatrix> jsvd(J, Eigen::ComputeThinU);
  const auto& js = jsvd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < js.size(); ++i)
    if (js(i) > 1e-12 * js(0)) ++rank;
  const CMatrix basis = jsvd.matrixU().leftCols(rank);
  const CMatrix op = restricted_operator_matrix(ens, rows, cols) * basis;
  Eigen::JacobiSVD<CMatrix> osvd(op, Eigen::ComputeFullV);
  const Index last = osvd.singularValues().size() - 1;
  const double s_min = last >= 0 ? osvd.singularValues()(last) : 0.0;
  const CVector direction = basis * osvd.matrixV().col(std::min<Index>(last + 1, rank) - 1);
  CMatrix T = CMatrix::Zero(ens.m1(), ens.m2());
  const CMatrix block = direction.reshaped(p, q);
  for (Index i = 0; i < p; ++i)
    for (Index k = 0; k < q; ++k)
      T(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(k)]) = block(i, k);

  const double delta_a = probe.delta / std::sqrt(static_cast<double>(ens.n()));
  constexpr double kMaxStep = 4.0;
  const Complex phases[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (const Complex phase : phases) {
    const auto point = [&](double t) { return rank_one_part(probe.M0.matrix() + (t * phase) * T); };
    const auto feasible = [&](double t) {
      StabilityProbe trial{probe.ens, probe.M0, probe.g0, probe.delta};
      return trial.consider(point(t));
    };
    double lo = 0.0;
    double hi = std::min(kMaxStep, 2.0 * delta_a / std::max(s_min, 1e-12));
    while (hi < kMaxStep && feasible(hi)) {
      lo = hi;
      hi = std::min(kMaxStep, 2.0 * hi);
    }
    if (hi >= kMaxStep && feasible(hi)) lo = hi;
    else
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
      }
    probe.consider(point(lo));
  }
}

void validate_plan(const TrialPlan& plan) {
  if (plan.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (plan.restarts < 0) throw std::invalid_argument("restarts must be >= 0");
  if (plan.noise_level < 0.0) throw std::invalid_argument("noise level must be >= 0");
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t row, std::size_t trial) noexcept {
  return mix_seed(mix_seed(master_seed, row), trial);
}

double exact_scalar_small_ball(double rho) {
  if (rho <= 0.0) return 0.0;
  if (rho >= 1.0) return 1.0;
  return rho * rho * (1.0 + 2.0 * std::log(1.0 / rho));
}

SmallBallEstimate estimate_small_ball_prob(const CMatrix& M, double R, double rho,
                                           std::size_t trials, std::uint64_t seed,
                                           unsigned threads) {
  if (M.size() == 0 || M.norm() == 0.0) throw std::invalid_argument("M must be nonzero");
  if (trials < 1000) throw std::invalid_argument("small-ball estimate needs >= 1000 trials");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const int m1 = static_cast<int>(M.rows());
  const int m2 = static_cast<int>(M.cols());
  const std::size_t chunks = chunk_count(trials);
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng(trial_seed(seed, 0, c));
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    std::size_t local = 0;
    for (std::size_t t = c * kChunk; t < end; ++t) {
      const CVector a = sample_uniform_complex_ball(m1, R, rng);
      const CVector b = sample_uniform_complex_ball(m2, R, rng);
      const Complex value = a.adjoint() * M * b.conjugate();
      if (std::abs(value) <= rho) ++local;
    }
    hits[c] = local;
  });
  SmallBallEstimate out;
  out.trials = trials;
  for (std::size_t h : hits) out.hits += h;
  out.p_hat = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.std_err = std::sqrt(out.p_hat * (1.0 - out.p_hat) / static_cast<double>(trials));
  return out;
}

std::vector<SmallBallRow> run_small_ball_sweep(const CMatrix& M, double R,
                                               const std::vector<double>& rhos,
                                               std::size_t trials, std::uint64_t seed,
                                               unsigned threads) {
  std::vector<SmallBallRow> rows;
  const double norm2 = M.size() == 0 ? 0.0 : spectral_norm(M);
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    SmallBallRow row;
    row.rho = rhos[r];
    row.estimate = estimate_small_ball_prob(M, R, rhos[r], trials, mix_seed(seed, r), threads);
    row.bound = small_ball_bound(Field::Complex, rhos[r], norm2, norm2, R,
                                 static_cast<int>(M.rows()), static_cast<int>(M.cols()));
    rows.push_back(row);
  }
  return rows;
}

MeanIsometryResult estimate_mean_isometry(int n, int m1, int m2, double R, const CMatrix& M,
                                          int trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (M.rows() != m1 || M.cols() != m2) throw std::invalid_argument("M must be m1 x m2");
  if (M.norm() == 0.0) throw std::invalid_argument("M must be nonzero");
  const ConstraintScenario sc = ConstraintScenario::subspace(n, m1, m2);
  std::vector<CMatrix> samples(static_cast<std::size_t>(trials));
  parallel_for(samples.size(), threads, [&](std::size_t t) {
    const Ensemble ens =
        build_complex_ensemble(sc, EnsembleTag::complex_uniform_ball(R), trial_seed(seed, 0, t));
    samples[t] = apply_GstarG(ens, M);
  });
  MeanIsometryResult out;
  out.average = CMatrix::Zero(m1, m2);
  for (const auto& s : samples) out.average += s;
  out.average /= static_cast<double>(trials);
  out.relative_error = (out.average - M).norm() / M.norm();
  out.radius = R;
  out.trials = trials;
  return out;
}

std::vector<SweepRow> run_phase_transition(const TrialPlan& plan) {
  validate_plan(plan);
  std::vector<SweepRow> rows;
  for (std::size_t r = 0; r < plan.sweep.size(); ++r) {
    const double value = plan.sweep[r];
    if (!(value >= 1.0) || value != std::floor(value))
      throw std::invalid_argument("transition sweep values must be positive integers");
    const ConstraintScenario sc = plan.scenario.with_n(static_cast<int>(value));
    sc.validate(Validation::Structural);
    EnsembleTag tag = plan.tag;
    if (tag.uniform_ball() && !tag.radius) tag.radius = mean_isometry_radius(sc.n, sc.m1, sc.m2);
    const Field field = tag.field();

    std::vector<double> errors(static_cast<std::size_t>(plan.trials));
    std::vector<char> success(errors.size(), 0);
    parallel_for(errors.size(), plan.threads, [&](std::size_t t) {
      Rng rng(trial_seed(plan.master_seed, r, t));
      const Ensemble ens = build_ensemble(sc, tag, rng.next_u64());
      const LiftedMatrix M0 = planted_truth(sc, field, rng);
      std::optional<CVector> noise;
      if (plan.noise_level > 0.0) noise = noise_vector(sc.n, plan.noise_level, field, rng);
      const MeasurementRecord rec = measure(ens, M0.matrix(), noise);
      const RecoveryResult res = solve(ens, rec.z_tilde, sc, plan.restarts, rng, plan.solver);
      errors[t] = align_and_distance(res.estimate, M0);
      success[t] = errors[t] <= recovery_threshold(M0) ? 1 : 0;
    });

    SweepRow row;
    row.value = value;
    row.trials = plan.trials;
    for (std::size_t t = 0; t < errors.size(); ++t) {
      row.successes += success[t];
      row.mean_lifted_error += errors[t];
      row.max_lifted_error = std::max(row.max_lifted_error, errors[t]);
    }
    row.mean_lifted_error /= plan.trials;
    row.rate = static_cast<double>(row.successes) / plan.trials;
    row.reference = sample_complexity_d(sc);
    row.reference_aux = 2.0 * sample_complexity_d(sc);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> run_stability_sweep(const TrialPlan& plan) {
  validate_plan(plan);
  if (plan.tag.kind != EnsembleTag::Kind::ComplexUniformBall)
    throw std::invalid_argument("stability sweep needs a complex uniform-ball ensemble");
  const ConstraintScenario& sc = plan.scenario;
  sc.validate(Validation::Structural);
  const int d = sample_complexity_d(sc);
  if (plan.mode == StabilityMode::SinglePoint && sc.n <= d)
    throw std::domain_error("single-point stability sweep requires n > d");
  if (plan.mode == StabilityMode::Uniform && sc.n <= 2 * d)
    throw std::domain_error("uniform stability sweep requires n > 2d");
  EnsembleTag tag = plan.tag;
  if (!tag.radius) tag.radius = mean_isometry_radius(sc.n, sc.m1, sc.m2);
  const double R = *tag.radius;

  std::vector<SweepRow> rows;
  for (std::size_t r = 0; r < plan.sweep.size(); ++r) {
    const double delta = plan.sweep[r];
    if (delta < 0.0 || !std::isfinite(delta))
      throw std::invalid_argument("stability sweep values must be nonnegative");
    double epsilon = std::numeric_limits<double>::infinity();
    double bound = 0.0;
    const SignedLog c = delta > 0.0 ? stability_constant(sc, plan.mode, R, delta) : SignedLog{};
    if (delta == 0.0) {
      epsilon = 0.0;
    } else if (c.sign <= 0) {
      bound = 1.0;
    } else if (c.sign > 0 && std::isfinite(c.log_abs)) {
      epsilon = epsilon_of_delta_log(sc, plan.mode, R, delta, c.log_abs);
      bound = failure_prob_bound(sc, plan.mode, R, delta, epsilon).clamped;
    }

    std::vector<double> worst(static_cast<std::size_t>(plan.trials));
    std::vector<char> stable(worst.size(), 0);
    parallel_for(worst.size(), plan.threads, [&](std::size_t t) {
      Rng rng(trial_seed(plan.master_seed, r, t));
      const Ensemble ens = build_complex_ensemble(sc, tag, rng.next_u64());
      const LiftedMatrix M0 = planted_truth(sc, Field::Complex, rng);
      StabilityProbe probe{ens, M0, apply_G(ens, M0), delta};
      probe.consider(M0.matrix());
      for (int k = 0; k <= plan.restarts; ++k) {
        const CVector e = noise_vector(sc.n, 0.5 * delta, Field::Complex, rng);
        const MeasurementRecord rec = measure(ens, M0.matrix(), e);
        probe.consider(solve(ens, rec.z_tilde, sc, plan.restarts, rng, plan.solver)
                           .estimate.matrix());
      }
      tangent_probe(probe);
      worst[t] = probe.best;
      stable[t] = probe.best <= std::max(epsilon, recovery_threshold(M0)) ? 1 : 0;
    });

    SweepRow row;
    row.value = delta;
    row.trials = plan.trials;
    for (std::size_t t = 0; t < worst.size(); ++t) {
      row.successes += stable[t];
      row.mean_lifted_error += worst[t];
      row.max_lifted_error = std::max(row.max_lifted_error, worst[t]);
    }
    row.mean_lifted_error /= plan.trials;
    row.rate = static_cast<double>(row.successes) / plan.trials;
    row.reference = epsilon;
    row.reference_aux = bound;
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw std::invalid_argument("loglog_slope needs two positive points");
  const double k = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace blindid
