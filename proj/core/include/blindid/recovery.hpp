#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "blindid/ensembles.hpp"
#include "blindid/lifting.hpp"
#include "blindid/rng.hpp"
#include "blindid/scenario.hpp"

namespace blindid {

struct SolverOptions {
  /// Alternating minimization stops after this many sweeps ...
  int max_iterations = 500;
  /// ... or when the relative change of the residual drops below this.
  double relative_tolerance = 1e-10;
  /// Upper limit on binom(m1,s1)*binom(m2,s2) for support enumeration.
  std::size_t enumeration_cap = 100000;
};

struct RecoveryResult {
  LiftedMatrix estimate;
  /// ||A(M_hat) - z~||_2
  double residual = 0.0;
  /// ||M_hat - M0||_F, filled in by callers that know the truth.
  std::optional<double> lifted_error;
  std::optional<SupportPair> support;
  int restarts_used = 0;
};

/// min ||A(M) - z~||_2 over rank-one M supported on rows x cols.
///
/// With n >= |rows|*|cols| the restricted linear least-squares problem is
/// solved and projected to its top singular pair; otherwise alternating
/// minimization starts from the top singular pair of A^*(z~) (restricted) plus
/// `restarts` random starts. The best residual wins; earlier candidates win
/// ties. Real ensembles restrict x and y to real vectors.
RecoveryResult solve_fixed_support(const Ensemble& ens, const CVector& z_tilde,
                                   const SupportPair& support, int restarts, Rng& rng,
                                   const SolverOptions& options = {});

/// Enumerates every admissible support pair and keeps the smallest residual,
/// breaking ties by lexicographic order of the support.
///
/// Throws std::invalid_argument for the Subspace kind, and std::length_error
/// when the number of support pairs exceeds options.enumeration_cap.
RecoveryResult solve_sparse_enumerate(const Ensemble& ens, const CVector& z_tilde,
                                      const ConstraintScenario& sc, int restarts, Rng& rng,
                                      const SolverOptions& options = {});

/// Scenario-appropriate solver (full support for Subspace, enumeration otherwise).
RecoveryResult solve(const Ensemble& ens, const CVector& z_tilde, const ConstraintScenario& sc,
                     int restarts, Rng& rng, const SolverOptions& options = {});

/// ||M1 - M2||_F. Lifting collapses the scaling orbit (sigma x, y / sigma)
/// to one matrix, so no explicit alignment is needed.
double align_and_distance(const LiftedMatrix& M1, const LiftedMatrix& M2);

/// min over complex c of ||M - c M0||_F.
double scaling_distance(const CMatrix& M, const CMatrix& M0);

/// Success threshold for "recovered": 1e-6 * max(1, ||M0||_F).
double recovery_threshold(const LiftedMatrix& M0) noexcept;

enum class VerdictStatus { CertifiedUnique, CounterexampleFound, HeuristicallyUnique };
std::string_view to_string(VerdictStatus status) noexcept;

struct IdentifiabilityVerdict {
  VerdictStatus status = VerdictStatus::HeuristicallyUnique;
  /// Spurious solution M != M0 with A(M) ~= A(reference).
  std::optional<LiftedMatrix> witness;
  /// The matrix the witness collides with (M0 for weak; the sampled M1 for strong).
  std::optional<LiftedMatrix> reference;
  int search_budget = 0;
  double tolerance = 0.0;
  /// Restricted operators examined by the rank certificate.
  std::size_t operators_checked = 0;
  /// Smallest singular value seen by the rank certificate.
  double min_singular_value = 0.0;
};

/// Weak identifiability of M0 (one planted pair).
///
/// Certified when every restricted operator on (S1 u supp_rows M0) x
/// (S2 u supp_cols M0), over all admissible (S1, S2), is injective with
/// smallest singular value > 1e-8. Otherwise `budget` random-start
/// minimizations of ||A(M) - A(M0)|| look for a far-away collision.
/// Throws std::invalid_argument when M0 has no nonzero factors.
IdentifiabilityVerdict certify_weak(const Ensemble& ens, const LiftedMatrix& M0,
                                    const ConstraintScenario& sc, int budget, double tol,
                                    Rng& rng, const SolverOptions& options = {});

/// Strong identifiability over the whole constraint set.
///
/// Certified when the operator restricted to every union of two admissible
/// supports is injective. Otherwise each of `budget` searches draws a
/// unit-Frobenius M1 from the constraint set and minimizes ||A(M2) - A(M1)||
/// from a random start.
IdentifiabilityVerdict certify_strong(const Ensemble& ens, const ConstraintScenario& sc,
                                      int budget, double tol, Rng& rng,
                                      const SolverOptions& options = {});

/// Checks the witness invariant of a CounterexampleFound verdict:
/// ||A(witness) - A(reference)|| <= tol, and both ||witness - reference||_F and
/// min_c ||witness - c*reference||_F exceed 10 * tol. Non-counterexample
/// verdicts are valid iff they carry no witness.
bool witness_is_valid(const Ensemble& ens, const IdentifiabilityVerdict& verdict);

/// Smallest singular value of the restricted operator (real-stacked for real
/// ensembles). Zero when the operator has more columns than rows.
double restricted_min_singular_value(const Ensemble& ens, const std::vector<int>& rows,
                                     const std::vector<int>& cols);

}  // namespace blindid
