#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindid/types.hpp"

namespace blindid {

enum class ScenarioKind { Subspace, Mixed, Sparsity };

std::string_view to_string(ScenarioKind kind) noexcept;
/// Accepts "subspace", "mixed", "sparsity"; throws ScenarioError otherwise.
ScenarioKind parse_scenario_kind(std::string_view text);

/// How strictly a scenario is checked.
///
/// Strict enforces the dimension regime of the constraint model (m1, m2 < n
/// for subspace factors). Structural only checks what the algebra needs
/// (positive sizes, s <= m, sparsity levels present exactly when required),
/// which is what undersampled sweeps across the identifiability threshold use.
enum class Validation { Strict, Structural };

/// Constraint sets Omega_X, Omega_Y for the coefficient vectors x, y.
///
/// Subspace: x in C^m1, y in C^m2. Mixed: ||x||_0 <= s1, y in C^m2.
/// Sparsity: ||x||_0 <= s1, ||y||_0 <= s2.
struct ConstraintScenario {
  ScenarioKind kind = ScenarioKind::Subspace;
  int n = 0;
  int m1 = 0;
  int m2 = 0;
  std::optional<int> s1;
  std::optional<int> s2;

  static ConstraintScenario subspace(int n, int m1, int m2);
  static ConstraintScenario mixed(int n, int m1, int s1, int m2);
  static ConstraintScenario sparsity(int n, int m1, int s1, int m2, int s2);

  /// Throws ScenarioError naming the violated invariant.
  void validate(Validation level = Validation::Strict) const;

  /// Number of nonzeros allowed in x (s1, or m1 when x is unconstrained).
  int x_support_size() const noexcept { return s1.value_or(m1); }
  int y_support_size() const noexcept { return s2.value_or(m2); }

  ConstraintScenario with_n(int new_n) const {
    ConstraintScenario copy = *this;
    copy.n = new_n;
    return copy;
  }

  friend bool operator==(const ConstraintScenario&, const ConstraintScenario&) = default;
};

/// One admissible support pattern: rows S1 of x, columns S2 of y, ascending.
struct SupportPair {
  std::vector<int> rows;
  std::vector<int> cols;

  friend bool operator==(const SupportPair&, const SupportPair&) = default;
  friend auto operator<=>(const SupportPair&, const SupportPair&) = default;
};

/// binom(m, k) as an exact integer when it fits; saturates at SIZE_MAX.
std::size_t binomial(int m, int k) noexcept;

/// Number of admissible support pairs: binom(m1,s1) * binom(m2,s2) (the
/// second factor is 1 when y is unconstrained).
std::size_t support_pair_count(const ConstraintScenario& sc) noexcept;

/// All admissible support pairs in lexicographic order of (S1, S2).
std::vector<SupportPair> admissible_supports(const ConstraintScenario& sc);

/// All k-subsets of {0..m-1} in lexicographic order.
std::vector<std::vector<int>> k_subsets(int m, int k);

}  // namespace blindid
