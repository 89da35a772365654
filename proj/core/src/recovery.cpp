#include "blindid/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace blindid {
namespace {

constexpr double kInjectivityFloor = 1e-8;

struct Factors {
  CVector x;
  CVector y;
};

void check_support(const Ensemble& ens, const SupportPair& support) {
  if (support.rows.empty() || support.cols.empty())
    throw std::invalid_argument("support sets must be nonempty");
  const auto check = [](const std::vector<int>& idx, int limit, const char* name) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= limit)
        throw std::out_of_range(std::string(name) + " support index out of range");
      if (i > 0 && idx[i] <= idx[i - 1])
        throw std::invalid_argument(std::string(name) + " support must be strictly ascending");
    }
  };
  check(support.rows, ens.m1(), "row");
  check(support.cols, ens.m2(), "column");
}

// Rows of F*D restricted to the support columns: P(j, i) = conj(a(rows[i], j)).
CMatrix freq_block(const CMatrix& rows_matrix, const std::vector<int>& idx) {
  CMatrix P(rows_matrix.cols(), static_cast<Index>(idx.size()));
  for (Index i = 0; i < P.cols(); ++i)
    P.col(i) = rows_matrix.row(idx[static_cast<std::size_t>(i)]).adjoint();
  return P;
}

// Minimum-norm least squares; real unknowns solve the stacked [Re; Im] system.
CVector least_squares(const CMatrix& A, const CVector& rhs, bool real_unknowns) {
  if (!real_unknowns) return A.completeOrthogonalDecomposition().solve(rhs);
  const Index n = A.rows();
  RMatrix stacked(2 * n, A.cols());
  stacked << A.real(), A.imag();
  RVector b(2 * n);
  b << rhs.real(), rhs.imag();
  const RVector sol = stacked.completeOrthogonalDecomposition().solve(b);
  return sol.cast<Complex>();
}

Factors rank_one_projection(const CMatrix& X, bool real_unknowns) {
  if (real_unknowns) {
    const RMatrix Xr = X.real();
    Eigen::JacobiSVD<RMatrix> svd(Xr, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s = std::sqrt(svd.singularValues()(0));
    return {(s * svd.matrixU().col(0)).cast<Complex>(),
            (s * svd.matrixV().col(0)).cast<Complex>()};
  }
  Eigen::JacobiSVD<CMatrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s = std::sqrt(svd.singularValues()(0));
  // X ~ sigma u v^H = (sqrt(sigma) u)(sqrt(sigma) conj(v))^T
  return {s * svd.matrixU().col(0), s * svd.matrixV().col(0).conjugate()};
}

double support_residual(const CMatrix& P, const CMatrix& Q, const Factors& f, const CVector& z) {
  return ((P * f.x).cwiseProduct(Q * f.y) - z).norm();
}

void balance(Factors& f) {
  const double nx = f.x.norm();
  const double ny = f.y.norm();
  if (nx > 0.0 && ny > 0.0) {
    const double s = std::sqrt(ny / nx);
    f.x *= s;
    f.y /= s;
  }
}

// Alternating least squares over x | y starting from init.y.
Factors alternating_minimization(const CMatrix& P, const CMatrix& Q, const CVector& z,
                                 Factors f, bool real_unknowns, const SolverOptions& options) {
  const double floor = 1e-15 * std::max(z.norm(), std::numeric_limits<double>::min());
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    f.x = least_squares((Q * f.y).asDiagonal() * P, z, real_unknowns);
    f.y = least_squares((P * f.x).asDiagonal() * Q, z, real_unknowns);
    balance(f);
    const double r = support_residual(P, Q, f, z);
    if (r <= floor) break;
    if (std::isfinite(previous) && std::abs(previous - r) <= options.relative_tolerance * previous)
      break;
    previous = r;
  }
  return f;
}

CVector random_factor(Index size, bool real_unknowns, Rng& rng) {
  return real_unknowns ? CVector(rng.normal_vector(size).cast<Complex>())
                       : rng.complex_normal_vector(size);
}

LiftedMatrix embed(const Ensemble& ens, const SupportPair& support, const Factors& f) {
  CVector x = CVector::Zero(ens.m1());
  CVector y = CVector::Zero(ens.m2());
  for (std::size_t i = 0; i < support.rows.size(); ++i) x(support.rows[i]) = f.x(static_cast<Index>(i));
  for (std::size_t k = 0; k < support.cols.size(); ++k) y(support.cols[k]) = f.y(static_cast<Index>(k));
  return LiftedMatrix::rank_one(x, y);
}

struct Incumbent {
  RecoveryResult best;
  bool found = false;

  void offer(const Ensemble& ens, const CVector& z, const SupportPair& support, const Factors& f) {
    LiftedMatrix M = embed(ens, support, f);
    const double r = (apply_A(ens, M) - z).norm();
    if (!std::isfinite(r)) return;
    if (!found || r < best.residual) {
      found = true;
      best.estimate = std::move(M);
      best.residual = r;
      best.support = support;
    }
  }
};

std::vector<int> nonzero_rows(const CMatrix& M) {
  std::vector<int> out;
  for (Index i = 0; i < M.rows(); ++i)
    if (M.row(i).cwiseAbs().maxCoeff() > 0.0) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> nonzero_cols(const CMatrix& M) {
  std::vector<int> out;
  for (Index k = 0; k < M.cols(); ++k)
    if (M.col(k).cwiseAbs().maxCoeff() > 0.0) out.push_back(static_cast<int>(k));
  return out;
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Rank certificate over a set of (rows, cols) blocks; returns the minimum
// singular value seen, stopping at the first non-injective block.
double certify_blocks(const Ensemble& ens, const std::set<SupportPair>& blocks,
                      IdentifiabilityVerdict& verdict) {
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& block : blocks) {
    const double s = restricted_min_singular_value(ens, block.rows, block.cols);
    ++verdict.operators_checked;
    smallest = std::min(smallest, s);
    if (!(s > kInjectivityFloor)) break;
  }
  verdict.min_singular_value = smallest;
  return smallest;
}

bool is_counterexample(const Ensemble& ens, const LiftedMatrix& candidate,
                       const LiftedMatrix& reference, const CVector& reference_measurement,
                       double tol) {
  const double residual = (apply_A(ens, candidate) - reference_measurement).norm();
  return residual <= tol && align_and_distance(candidate, reference) > 10.0 * tol &&
         scaling_distance(candidate.matrix(), reference.matrix()) > 10.0 * tol;
}

// One random-start search for a rank-one M on `support` matching `target`.
LiftedMatrix random_start_search(const Ensemble& ens, const SupportPair& support,
                                 const CVector& target, Rng& rng, const SolverOptions& options) {
  const bool real_unknowns = ens.field() == Field::Real;
  const CMatrix P = freq_block(ens.a, support.rows);
  const CMatrix Q = freq_block(ens.b, support.cols);
  Factors f{CVector::Zero(P.cols()),
            random_factor(static_cast<Index>(support.cols.size()), real_unknowns, rng)};
  f = alternating_minimization(P, Q, target, std::move(f), real_unknowns, options);
  return embed(ens, support, f);
}

void check_budget(int budget, double tol) {
  if (budget < 0) throw std::invalid_argument("search budget must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

}  // namespace

RecoveryResult solve_fixed_support(const Ensemble& ens, const CVector& z_tilde,
                                   const SupportPair& support, int restarts, Rng& rng,
                                   const SolverOptions& options) {
  check_support(ens, support);
  if (z_tilde.size() != ens.n())
    throw std::invalid_argument("measurement length must equal n");
  if (restarts < 0) throw std::invalid_argument("restarts must be >= 0");
  const std::uint64_t base = rng.next_u64();
  const bool real_unknowns = ens.field() == Field::Real;
  const Index p = static_cast<Index>(support.rows.size());
  const Index q = static_cast<Index>(support.cols.size());

  Incumbent incumbent;
  if (z_tilde.norm() == 0.0) {
    incumbent.offer(ens, z_tilde, support, {CVector::Zero(p), CVector::Zero(q)});
    return incumbent.best;
  }

  const CMatrix P = freq_block(ens.a, support.rows);
  const CMatrix Q = freq_block(ens.b, support.cols);
  int restarts_used = 0;
  if (ens.n() >= p * q) {
    const CMatrix op = restricted_operator_matrix(ens, support.rows, support.cols);
    const CVector v = least_squares(op, z_tilde, real_unknowns);
    const Factors projected = rank_one_projection(unvec(v, p, q), real_unknowns);
    incumbent.offer(ens, z_tilde, support, projected);
    incumbent.offer(ens, z_tilde, support,
                    alternating_minimization(P, Q, z_tilde, projected, real_unknowns, options));
  } else {
    CMatrix back = apply_A_adjoint(ens, z_tilde);
    CMatrix restricted(p, q);
    for (Index i = 0; i < p; ++i)
      for (Index k = 0; k < q; ++k)
        restricted(i, k) = back(support.rows[static_cast<std::size_t>(i)],
                                support.cols[static_cast<std::size_t>(k)]);
    if (restricted.norm() > 0.0) {
      const Factors init = rank_one_projection(restricted, real_unknowns);
      incumbent.offer(ens, z_tilde, support,
                      alternating_minimization(P, Q, z_tilde, init, real_unknowns, options));
    }
    for (int r = 0; r < restarts; ++r) {
      Rng child(mix_seed(base, static_cast<std::uint64_t>(r)));
      Factors init{CVector::Zero(p), random_factor(q, real_unknowns, child)};
      incumbent.offer(ens, z_tilde, support,
                      alternating_minimization(P, Q, z_tilde, std::move(init), real_unknowns,
                                               options));
      ++restarts_used;
    }
  }
  if (!incumbent.found) incumbent.offer(ens, z_tilde, support, {CVector::Zero(p), CVector::Zero(q)});
  incumbent.best.restarts_used = restarts_used;
  return incumbent.best;
}

RecoveryResult solve_sparse_enumerate(const Ensemble& ens, const CVector& z_tilde,
                                      const ConstraintScenario& sc, int restarts, Rng& rng,
                                      const SolverOptions& options) {
  if (sc.kind == ScenarioKind::Subspace)
    throw std::invalid_argument("support enumeration needs a mixed or sparsity scenario");
  sc.validate(Validation::Structural);
  if (sc.m1 != ens.m1() || sc.m2 != ens.m2() || sc.n != ens.n())
    throw std::invalid_argument("scenario dimensions do not match the ensemble");
  const std::size_t count = support_pair_count(sc);
  if (count > options.enumeration_cap)
    throw std::length_error("support enumeration would visit " + std::to_string(count) +
                            " pairs, above the cap of " +
                            std::to_string(options.enumeration_cap) +
                            "; use a smaller instance");
  const std::uint64_t base = rng.next_u64();
  const auto supports = admissible_supports(sc);
  RecoveryResult best;
  bool found = false;
  int restarts_used = 0;
  for (std::size_t s = 0; s < supports.size(); ++s) {
    Rng child(mix_seed(base, s));
    RecoveryResult res = solve_fixed_support(ens, z_tilde, supports[s], restarts, child, options);
    restarts_used += res.restarts_used;
    if (!found || res.residual < best.residual) {
      best = std::move(res);
      found = true;
    }
  }
  best.restarts_used = restarts_used;
  return best;
}

RecoveryResult solve(const Ensemble& ens, const CVector& z_tilde, const ConstraintScenario& sc,
                     int restarts, Rng& rng, const SolverOptions& options) {
  if (sc.kind == ScenarioKind::Subspace) {
    SupportPair full = admissible_supports(sc).front();
    return solve_fixed_support(ens, z_tilde, full, restarts, rng, options);
  }
  return solve_sparse_enumerate(ens, z_tilde, sc, restarts, rng, options);
}

double align_and_distance(const LiftedMatrix& M1, const LiftedMatrix& M2) {
  if (M1.rows() != M2.rows() || M1.cols() != M2.cols())
    throw std::invalid_argument("align_and_distance: shape mismatch");
  return (M1.matrix() - M2.matrix()).norm();
}

double scaling_distance(const CMatrix& M, const CMatrix& M0) {
  if (M.rows() != M0.rows() || M.cols() != M0.cols())
    throw std::invalid_argument("scaling_distance: shape mismatch");
  const double n0 = M0.squaredNorm();
  if (n0 == 0.0) return M.norm();
  const Complex c = (M0.conjugate().cwiseProduct(M)).sum() / n0;
  return (M - c * M0).norm();
}

double recovery_threshold(const LiftedMatrix& M0) noexcept {
  return 1e-6 * std::max(1.0, M0.norm());
}

std::string_view to_string(VerdictStatus status) noexcept {
  switch (status) {
    case VerdictStatus::CertifiedUnique: return "CertifiedUnique";
    case VerdictStatus::CounterexampleFound: return "CounterexampleFound";
    case VerdictStatus::HeuristicallyUnique: return "HeuristicallyUnique";
  }
  return "unknown";
}

double restricted_min_singular_value(const Ensemble& ens, const std::vector<int>& rows,
                                     const std::vector<int>& cols) {
  const CMatrix op = restricted_operator_matrix(ens, rows, cols);
  if (ens.field() == Field::Real) {
    RMatrix stacked(2 * op.rows(), op.cols());
    stacked << op.real(), op.imag();
    if (stacked.rows() < stacked.cols()) return 0.0;
    Eigen::JacobiSVD<RMatrix> svd(stacked);
    return svd.singularValues().minCoeff();
  }
  if (op.rows() < op.cols()) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(op);
  return svd.singularValues().minCoeff();
}

IdentifiabilityVerdict certify_weak(const Ensemble& ens, const LiftedMatrix& M0,
                                    const ConstraintScenario& sc, int budget, double tol,
                                    Rng& rng, const SolverOptions& options) {
  check_budget(budget, tol);
  sc.validate(Validation::Structural);
  if (M0.rows() != ens.m1() || M0.cols() != ens.m2())
    throw std::invalid_argument("M0 shape does not match the ensemble");
  if (M0.has_factors() && (M0.x().norm() == 0.0 || M0.y().norm() == 0.0))
    throw std::invalid_argument("M0 must have nonzero factors x0, y0");
  if (M0.norm() == 0.0 || numerical_rank(M0.matrix(), 1e-10) != 1)
    throw std::invalid_argument("M0 must be a nonzero rank-one matrix");

  IdentifiabilityVerdict verdict;
  verdict.search_budget = budget;
  verdict.tolerance = tol;
  const std::uint64_t base = rng.next_u64();

  const std::vector<int> rows0 = nonzero_rows(M0.matrix());
  const std::vector<int> cols0 = nonzero_cols(M0.matrix());
  if (support_pair_count(sc) <= options.enumeration_cap) {
    std::set<SupportPair> blocks;
    for (const auto& s : admissible_supports(sc))
      blocks.insert({sorted_union(s.rows, rows0), sorted_union(s.cols, cols0)});
    if (certify_blocks(ens, blocks, verdict) > kInjectivityFloor) {
      verdict.status = VerdictStatus::CertifiedUnique;
      return verdict;
    }
  }

  const CVector target = apply_A(ens, M0);
  const auto supports = admissible_supports(sc);
  for (int b = 0; b < budget; ++b) {
    Rng child(mix_seed(base, static_cast<std::uint64_t>(b)));
    const SupportPair& support = supports[static_cast<std::size_t>(b) % supports.size()];
    LiftedMatrix candidate = random_start_search(ens, support, target, child, options);
    if (is_counterexample(ens, candidate, M0, target, tol)) {
      verdict.status = VerdictStatus::CounterexampleFound;
      verdict.witness = std::move(candidate);
      verdict.reference = M0;
      return verdict;
    }
  }
  verdict.status = VerdictStatus::HeuristicallyUnique;
  return verdict;
}

IdentifiabilityVerdict certify_strong(const Ensemble& ens, const ConstraintScenario& sc,
                                      int budget, double tol, Rng& rng,
                                      const SolverOptions& options) {
  check_budget(budget, tol);
  sc.validate(Validation::Structural);
  if (sc.m1 != ens.m1() || sc.m2 != ens.m2() || sc.n != ens.n())
    throw std::invalid_argument("scenario dimensions do not match the ensemble");

  IdentifiabilityVerdict verdict;
  verdict.search_budget = budget;
  verdict.tolerance = tol;
  const std::uint64_t base = rng.next_u64();

  const std::size_t count = support_pair_count(sc);
  if (count <= options.enumeration_cap && count * (count + 1) / 2 <= options.enumeration_cap) {
    const auto supports = admissible_supports(sc);
    std::set<SupportPair> blocks;
    for (std::size_t s = 0; s < supports.size(); ++s)
      for (std::size_t t = s; t < supports.size(); ++t)
        blocks.insert({sorted_union(supports[s].rows, supports[t].rows),
                       sorted_union(supports[s].cols, supports[t].cols)});
    if (certify_blocks(ens, blocks, verdict) > kInjectivityFloor) {
      verdict.status = VerdictStatus::CertifiedUnique;
      return verdict;
    }
  }
  if (count > options.enumeration_cap)
    throw std::length_error("support enumeration above the cap; use a smaller instance");

  const auto supports = admissible_supports(sc);
  const bool real_unknowns = ens.field() == Field::Real;
  for (int b = 0; b < budget; ++b) {
    Rng child(mix_seed(base, static_cast<std::uint64_t>(b)));
    const SupportPair& s1 = supports[child.next_u64() % supports.size()];
    Factors f{random_factor(static_cast<Index>(s1.rows.size()), real_unknowns, child),
              random_factor(static_cast<Index>(s1.cols.size()), real_unknowns, child)};
    LiftedMatrix M1 = embed(ens, s1, f);
    const double scale = 1.0 / M1.norm();
    M1 = LiftedMatrix::rank_one(M1.x() * scale, M1.y());
    const CVector target = apply_A(ens, M1);
    const SupportPair& s2 = supports[static_cast<std::size_t>(b) % supports.size()];
    LiftedMatrix candidate = random_start_search(ens, s2, target, child, options);
    if (is_counterexample(ens, candidate, M1, target, tol)) {
      verdict.status = VerdictStatus::CounterexampleFound;
      verdict.witness = std::move(candidate);
      verdict.reference = std::move(M1);
      return verdict;
    }
  }
  verdict.status = VerdictStatus::HeuristicallyUnique;
  return verdict;
}

bool witness_is_valid(const Ensemble& ens, const IdentifiabilityVerdict& verdict) {
  if (verdict.status != VerdictStatus::CounterexampleFound) return !verdict.witness.has_value();
  if (!verdict.witness || !verdict.reference) return false;
  const LiftedMatrix& w = *verdict.witness;
  const LiftedMatrix& ref = *verdict.reference;
  if (numerical_rank(w.matrix(), 1e-10) > 1) return false;
  return is_counterexample(ens, w, ref, apply_A(ens, ref), verdict.tolerance);
}

}  // namespace blindid
