#include "blindid/scenario.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace blindid {

std::string_view to_string(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::Subspace: return "subspace";
    case ScenarioKind::Mixed: return "mixed";
    case ScenarioKind::Sparsity: return "sparsity";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "subspace") return ScenarioKind::Subspace;
  if (text == "mixed") return ScenarioKind::Mixed;
  if (text == "sparsity") return ScenarioKind::Sparsity;
  throw ScenarioError("unknown scenario kind '" + std::string(text) +
                      "' (expected subspace, mixed or sparsity)");
}

ConstraintScenario ConstraintScenario::subspace(int n, int m1, int m2) {
  return {ScenarioKind::Subspace, n, m1, m2, std::nullopt, std::nullopt};
}

ConstraintScenario ConstraintScenario::mixed(int n, int m1, int s1, int m2) {
  return {ScenarioKind::Mixed, n, m1, m2, s1, std::nullopt};
}

ConstraintScenario ConstraintScenario::sparsity(int n, int m1, int s1, int m2, int s2) {
  return {ScenarioKind::Sparsity, n, m1, m2, s1, s2};
}

void ConstraintScenario::validate(Validation level) const {
  const auto fail = [](const std::string& what) { throw ScenarioError(what); };
  if (n < 1) fail("n must be >= 1");
  if (m1 < 1) fail("m1 must be >= 1");
  if (m2 < 1) fail("m2 must be >= 1");
  const bool strict = level == Validation::Strict;
  switch (kind) {
    case ScenarioKind::Subspace:
      if (s1 || s2) fail("subspace scenario takes no sparsity levels");
      if (strict && m1 >= n) fail("subspace scenario requires m1 < n");
      if (strict && m2 >= n) fail("subspace scenario requires m2 < n");
      break;
    case ScenarioKind::Mixed:
      if (!s1) fail("mixed scenario requires s1");
      if (s2) fail("mixed scenario takes no s2");
      if (*s1 < 1 || *s1 > m1) fail("mixed scenario requires 1 <= s1 <= m1");
      if (strict && m2 >= n) fail("mixed scenario requires m2 < n");
      break;
    case ScenarioKind::Sparsity:
      if (!s1 || !s2) fail("sparsity scenario requires s1 and s2");
      if (*s1 < 1 || *s1 > m1) fail("sparsity scenario requires 1 <= s1 <= m1");
      if (*s2 < 1 || *s2 > m2) fail("sparsity scenario requires 1 <= s2 <= m2");
      break;
  }
}

std::size_t binomial(int m, int k) noexcept {
  if (k < 0 || m < 0 || k > m) return 0;
  if (k > m - k) k = m - k;
  __extension__ using wide = unsigned __int128;
  wide acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(m - k + i) / static_cast<unsigned>(i);
    if (acc > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(acc);
}

std::size_t support_pair_count(const ConstraintScenario& sc) noexcept {
  const std::size_t rows = binomial(sc.m1, sc.x_support_size());
  const std::size_t cols = binomial(sc.m2, sc.y_support_size());
  if (rows != 0 && cols > std::numeric_limits<std::size_t>::max() / rows)
    return std::numeric_limits<std::size_t>::max();
  return rows * cols;
}

std::vector<std::vector<int>> k_subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > m) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<SupportPair> admissible_supports(const ConstraintScenario& sc) {
  const auto rows = k_subsets(sc.m1, sc.x_support_size());
  const auto cols = k_subsets(sc.m2, sc.y_support_size());
  std::vector<SupportPair> out;
  out.reserve(rows.size() * cols.size());
  for (const auto& r : rows)
    for (const auto& c : cols) out.push_back({r, c});
  return out;
}

}  // namespace blindid
