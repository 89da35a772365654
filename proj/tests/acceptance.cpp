// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "blindid/bounds.hpp"
#include "blindid/mc.hpp"
#include "blindid/report.hpp"
#include "blindid/spectral.hpp"

using namespace blindid;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void check(int id, const std::string& title, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= time_limit_s) {
    o.pass = false;
    o.detail += "; over time limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s (%.2fs, limit %.0fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs, time_limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- criterion 1 oracle: direct long-double evaluation of d, C' and C''.
long double binom_ld(int m, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r;
}

int oracle_d(const ConstraintScenario& sc) {
  switch (sc.kind) {
    case ScenarioKind::Subspace: return sc.m1 + sc.m2;
    case ScenarioKind::Mixed: return *sc.s1 + sc.m2;
    case ScenarioKind::Sparsity: return *sc.s1 + *sc.s2;
  }
  return 0;
}

long double oracle_log_constant(const ConstraintScenario& sc, bool uniform, long double R,
                               long double delta) {
  const long double C = 648.0L * sc.m1 * sc.m2 *
                        (1 + 2 * std::log(2 * std::sqrt((long double)sc.n) * R * R / (3 * delta)));
  const int power = uniform ? 4 : 2;
  long double mult = 1;
  if (sc.kind != ScenarioKind::Subspace) mult *= std::pow(binom_ld(sc.m1, *sc.s1), power);
  if (sc.kind == ScenarioKind::Sparsity) mult *= std::pow(binom_ld(sc.m2, *sc.s2), power);
  const int d = oracle_d(sc);
  return std::log(mult) + sc.n * std::log(uniform ? 4 * C : C) -
         (sc.n - (uniform ? 2 * d : d)) * std::log((long double)sc.n);
}

Outcome criterion1() {
  const std::vector<ConstraintScenario> grid = {
      ConstraintScenario::subspace(8, 1, 2),        ConstraintScenario::subspace(12, 3, 4),
      ConstraintScenario::subspace(24, 5, 6),       ConstraintScenario::mixed(10, 4, 1, 2),
      ConstraintScenario::mixed(14, 6, 2, 3),       ConstraintScenario::mixed(30, 9, 4, 5),
      ConstraintScenario::sparsity(6, 3, 1, 3, 1),  ConstraintScenario::sparsity(16, 6, 2, 5, 2),
      ConstraintScenario::sparsity(25, 10, 3, 8, 3), ConstraintScenario::sparsity(40, 16, 5, 12, 6)};
  double worst = 0.0;
  int d_mismatch = 0;
  for (const auto& sc : grid) {
    if (sample_complexity_d(sc) != oracle_d(sc)) ++d_mismatch;
    for (double delta : {1e-3, 0.1}) {
      for (bool uniform : {false, true}) {
        const SignedLog c = stability_constant(
            sc, uniform ? StabilityMode::Uniform : StabilityMode::SinglePoint, 0.8, delta);
        const long double expected = oracle_log_constant(sc, uniform, 0.8L, delta);
        // |C_impl / C_oracle - 1| through the log difference.
        const double rel = std::expm1(std::abs(c.log_abs - static_cast<double>(expected)));
        if (c.sign != 1) worst = INFINITY;
        worst = std::max(worst, rel);
      }
    }
  }
  return {d_mismatch == 0 && worst <= 1e-12,
          "d mismatches " + std::to_string(d_mismatch) + ", max rel err C'/C'' " +
              fmt("%.3g", worst) + " (tol 1e-12)"};
}

Outcome criterion2() {
  Rng rng(2024);
  double conv_worst = 0.0, meas_worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 64);
    const CVector u = rng.complex_normal_vector(n);
    const CVector v = rng.complex_normal_vector(n);
    const CVector spectral = std::sqrt(static_cast<double>(n)) *
                             dft(dft(u).cwiseProduct(dft(v)).eval(), Direction::Inverse);
    conv_worst = std::max(conv_worst, (circular_convolve(u, v) - spectral).norm() / (u.norm() * v.norm()));

    const int m1 = 1 + static_cast<int>(rng.next_u64() % 4);
    const int m2 = 1 + static_cast<int>(rng.next_u64() % 4);
    const Ensemble ens = build_complex_ensemble(ConstraintScenario::subspace(n, m1, m2),
                                                EnsembleTag::complex_generic(), rng.next_u64());
    CMatrix M(m1, m2);
    for (Index k = 0; k < m2; ++k)
      for (Index i = 0; i < m1; ++i) M(i, k) = rng.complex_normal();
    const CVector w = apply_A(ens, M);
    double scale = 0.0, err = 0.0;
    for (Index j = 0; j < n; ++j) {
      const Complex direct = (ens.a.col(j).adjoint() * M * ens.b.col(j).conjugate())(0, 0);
      err = std::max(err, std::abs(w(j) - direct));
      scale = std::max(scale, std::abs(direct));
    }
    meas_worst = std::max(meas_worst, err / std::max(scale, 1e-300));
  }
  return {conv_worst < 1e-10 && meas_worst < 1e-10,
          "conv rel " + fmt("%.3g", conv_worst) + ", measurement rel " + fmt("%.3g", meas_worst) +
              " (tol 1e-10)"};
}

std::string mean_isometry_csv(unsigned threads, double* rel) {
  const int n = 8, m1 = 2, m2 = 2;
  Rng rng(31);
  CMatrix M(m1, m2);
  for (Index k = 0; k < m2; ++k)
    for (Index i = 0; i < m1; ++i) M(i, k) = rng.complex_normal();
  const auto res = estimate_mean_isometry(n, m1, m2, mean_isometry_radius(n, m1, m2), M, 20000, 33,
                                          threads);
  if (rel) *rel = res.relative_error;
  std::ostringstream out;
  write_mean_isometry_csv(out, n, m1, m2, res);
  return out.str();
}

Outcome criterion3() {
  double rel = 0.0;
  mean_isometry_csv(1, &rel);
  return {rel <= 0.03, "relative error " + fmt("%.4f", rel) + " (tol 0.03)"};
}

std::string small_ball_csv(unsigned threads, bool* ok, std::string* detail) {
  std::ostringstream out;
  const std::vector<double> rhos = {0.05, 0.1, 0.2};
  const auto scalar = run_small_ball_sweep(CMatrix::Ones(1, 1), 1.0, rhos, 100000, 41, threads);
  write_small_ball_csv(out, scalar);
  double worst_tight = 0.0;
  for (const auto& r : scalar)
    worst_tight = std::max(worst_tight, std::abs(r.estimate.p_hat - exact_scalar_small_ball(r.rho)) /
                                            r.estimate.std_err);
  Rng rng(43);
  double worst_excess = -INFINITY;
  for (int t = 0; t < 20; ++t) {
    const int m1 = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m2 = 1 + static_cast<int>(rng.next_u64() % 3);
    CMatrix M(m1, m2);
    for (Index k = 0; k < m2; ++k)
      for (Index i = 0; i < m1; ++i) M(i, k) = rng.complex_normal();
    const auto rows = run_small_ball_sweep(M, 1.0, rhos, 20000, rng.next_u64(), threads);
    write_small_ball_csv(out, rows);
    for (const auto& r : rows)
      worst_excess = std::max(worst_excess, (r.estimate.p_hat - r.bound) / r.estimate.std_err);
  }
  if (ok) *ok = worst_tight <= 3.0 && worst_excess <= 3.0;
  if (detail)
    *detail = "scalar |p-p*|/SE max " + fmt("%.2f", worst_tight) + " (tol 3), random M (p-bound)/SE max " +
              fmt("%.2f", worst_excess) + " (tol 3)";
  return out.str();
}

Outcome criterion4() {
  Outcome o;
  small_ball_csv(1, &o.pass, &o.detail);
  return o;
}

TrialPlan transition_plan(ConstraintScenario sc, EnsembleTag tag, std::vector<double> sweep,
                          std::uint64_t seed, unsigned threads) {
  TrialPlan plan;
  plan.scenario = sc;
  plan.tag = tag;
  plan.trials = 100;
  plan.restarts = 20;
  plan.master_seed = seed;
  plan.sweep = std::move(sweep);
  plan.threads = threads;
  return plan;
}

std::string transition_csv(unsigned threads, bool* ok, std::string* detail) {
  const std::vector<double> ns = {2, 3, 4, 5, 6, 7, 8};
  const auto a = run_phase_transition(transition_plan(ConstraintScenario::subspace(2, 2, 2),
                                                      EnsembleTag::complex_generic(), ns, 51, threads));
  const auto b = run_phase_transition(transition_plan(ConstraintScenario::sparsity(5, 4, 1, 4, 1),
                                                      EnsembleTag::complex_generic(), {5}, 52, threads));
  const auto c = run_phase_transition(transition_plan(ConstraintScenario::subspace(2, 2, 2),
                                                      EnsembleTag::real_generic(), ns, 53, threads));
  const auto shape_ok = [](const std::vector<SweepRow>& rows) {
    bool good = rows.front().rate < 0.5;
    for (const auto& r : rows)
      if (r.value >= 5) good = good && r.rate >= 0.99;
    return good;
  };
  const bool ok_a = shape_ok(a);
  const bool ok_b = b.front().rate >= 0.99;
  const bool ok_c = shape_ok(c);
  double min_a = 1, min_c = 1;
  for (const auto& r : a)
    if (r.value >= 5) min_a = std::min(min_a, r.rate);
  for (const auto& r : c)
    if (r.value >= 5) min_c = std::min(min_c, r.rate);
  if (ok) *ok = ok_a && ok_b && ok_c;
  if (detail)
    *detail = "(a) rate n=2 " + fmt("%.2f", a.front().rate) + ", min n>=5 " + fmt("%.2f", min_a) +
              "; (b) rate n=5 " + fmt("%.2f", b.front().rate) + "; (c) real rate n=2 " +
              fmt("%.2f", c.front().rate) + ", min n>=5 " + fmt("%.2f", min_c);
  std::ostringstream out;
  write_transition_csv(out, a);
  write_transition_csv(out, b);
  write_transition_csv(out, c);
  return out.str();
}

Outcome criterion5() {
  Outcome o;
  transition_csv(1, &o.pass, &o.detail);
  return o;
}

std::string certify_record(bool* ok, std::string* detail) {
  Rng rng(61);
  const auto sc4 = ConstraintScenario::subspace(4, 2, 2);
  const Ensemble e4 = build_complex_ensemble(sc4, EnsembleTag::complex_generic(), 62);
  const auto v4 = certify_strong(e4, sc4, 50, 1e-8, rng);
  const auto sc1 = ConstraintScenario::subspace(1, 2, 2);
  const Ensemble e1 = build_complex_ensemble(sc1, EnsembleTag::complex_generic(), 63);
  const auto v1 = certify_strong(e1, sc1, 50, 1e-8, rng);
  const bool valid = witness_is_valid(e1, v1) && witness_is_valid(e4, v4);
  if (ok)
    *ok = v4.status == VerdictStatus::CertifiedUnique &&
          v1.status == VerdictStatus::CounterexampleFound && valid;
  if (detail)
    *detail = "n=4 " + std::string(to_string(v4.status)) + ", n=1 " +
              std::string(to_string(v1.status)) + ", witness invariant " + (valid ? "holds" : "broken");
  return to_json(v4, e4).dump() + "\n" + to_json(v1, e1).dump() + "\n";
}

Outcome criterion6() {
  Outcome o;
  certify_record(&o.pass, &o.detail);
  return o;
}

std::string stability_csv(unsigned threads, bool* ok, std::string* detail) {
  TrialPlan plan;
  plan.scenario = ConstraintScenario::subspace(10, 2, 2);
  plan.tag = EnsembleTag{EnsembleTag::Kind::ComplexUniformBall, std::nullopt};
  plan.trials = 1000;
  plan.restarts = 4;
  plan.master_seed = 71;
  plan.sweep = {0.3, 0.1, 0.03, 0.0};
  plan.threads = threads;
  const auto rows = run_stability_sweep(plan);
  bool good = true;
  std::string text;
  for (const auto& r : rows) {
    const double rate = static_cast<double>(r.trials - r.successes) / r.trials;
    if (r.value == 0.0) good = good && r.successes == r.trials;
    else if (r.reference_aux < 1.0) good = good && rate <= r.reference_aux;
    text += "delta=" + fmt("%g", r.value) + " rate " + fmt("%.3f", rate) + " bound " +
            fmt("%.3g", r.reference_aux) + "; ";
  }
  if (ok) *ok = good;
  if (detail) *detail = text;
  std::ostringstream out;
  write_stability_csv(out, rows);
  return out.str();
}

Outcome criterion7() {
  Outcome o;
  stability_csv(1, &o.pass, &o.detail);
  return o;
}

Outcome criterion8() {
  const auto all = [](unsigned threads) {
    return mean_isometry_csv(threads, nullptr) + small_ball_csv(threads, nullptr, nullptr) +
           transition_csv(threads, nullptr, nullptr) + certify_record(nullptr, nullptr) +
           stability_csv(threads, nullptr, nullptr);
  };
  const std::string one = all(1);
  const std::string again = all(1);
  const std::string eight = all(8);
  const bool same = one == again && one == eight;
  return {same, std::to_string(one.size()) + " bytes, 1 vs 1 thread " +
                    (one == again ? "identical" : "DIFFERENT") + ", 1 vs 8 threads " +
                    (one == eight ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  check(1, "stability constants on a dimension grid", 1, criterion1);
  check(2, "convolution theorem and measurement identity", 5, criterion2);
  check(3, "mean isometry at the printed radius", 60, criterion3);
  {
    // Diagnostic only: the radius whose fourth power matches the uniform-ball
    // second moment E||a||^2 = m R^2 / (m + 1).
    Rng rng(31);
    CMatrix M(2, 2);
    for (Index k = 0; k < 2; ++k)
      for (Index i = 0; i < 2; ++i) M(i, k) = rng.complex_normal();
    const auto res = estimate_mean_isometry(8, 2, 2, complex_ball_isometry_radius(8, 2, 2), M, 20000, 33);
    std::printf("INFO [3] radius ((m1+1)(m2+1)/n^2)^(1/4) = %.6f: relative error %.4f\n", res.radius,
                res.relative_error);
  }
  check(4, "small-ball sharp case and bound", 60, criterion4);
  check(5, "identifiability transitions", 300, criterion5);
  check(6, "strong certifier soundness", 10, criterion6);
  check(7, "stability consistency", 600, criterion7);
  check(8, "determinism across 1 and 8 threads", 1800, criterion8);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
