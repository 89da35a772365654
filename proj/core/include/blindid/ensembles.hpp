#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "blindid/rng.hpp"
#include "blindid/scenario.hpp"
#include "blindid/types.hpp"

namespace blindid {

/// Distribution the bases D, E are drawn from.
struct EnsembleTag {
  enum class Kind { ComplexGeneric, ComplexUniformBall, RealGeneric, RealUniformBall };

  Kind kind = Kind::ComplexGeneric;
  /// Ball radius; present exactly for the UniformBall kinds.
  std::optional<double> radius;

  static EnsembleTag complex_generic() { return {Kind::ComplexGeneric, std::nullopt}; }
  static EnsembleTag complex_uniform_ball(double R) { return {Kind::ComplexUniformBall, R}; }
  static EnsembleTag real_generic() { return {Kind::RealGeneric, std::nullopt}; }
  static EnsembleTag real_uniform_ball(double R) { return {Kind::RealUniformBall, R}; }

  Field field() const noexcept {
    return kind == Kind::RealGeneric || kind == Kind::RealUniformBall ? Field::Real
                                                                      : Field::Complex;
  }
  bool uniform_ball() const noexcept {
    return kind == Kind::ComplexUniformBall || kind == Kind::RealUniformBall;
  }

  friend bool operator==(const EnsembleTag&, const EnsembleTag&) = default;
};

std::string_view to_string(EnsembleTag::Kind kind) noexcept;
/// "complex_generic", "complex_ball", "real_generic", "real_ball".
EnsembleTag::Kind parse_ensemble_kind(std::string_view text);

/// Bases D (n x m1), E (n x m2) and their frequency-domain rows.
///
/// Column j of `a` is a_j = (F D)^{(j,:)*}, so row j of F*D equals a_j^H;
/// likewise `b` for E. The measurement identity is then
/// (1/sqrt(n)) (F z)_j = a_j^H M conj(b_j).
struct Ensemble {
  ConstraintScenario scenario;
  EnsembleTag tag;
  std::uint64_t seed = 0;
  CMatrix D;
  CMatrix E;
  CMatrix a;  // m1 x n
  CMatrix b;  // m2 x n

  int n() const noexcept { return static_cast<int>(D.rows()); }
  int m1() const noexcept { return static_cast<int>(D.cols()); }
  int m2() const noexcept { return static_cast<int>(E.cols()); }
  Field field() const noexcept { return tag.field(); }
};

/// Uniform sample from the radius-R ball of C^m (real dimension 2m):
/// isotropic Gaussian direction times R * U^{1/(2m)}.
CVector sample_uniform_complex_ball(int m, double R, Rng& rng);

/// Uniform sample from the radius-R ball of R^m.
RVector sample_uniform_real_ball(int m, double R, Rng& rng);

/// Uniform sample on the radius-r sphere of C^m.
CVector sample_complex_sphere(int m, double r, Rng& rng);

/// Frequency rows of a basis: column j of the result is (F B)^{(j,:)*}.
CMatrix frequency_rows(const CMatrix& B);

/// Inverse of frequency_rows(): B = F^H [a_1 ... a_n]^H.
CMatrix basis_from_rows(const CMatrix& rows);

/// ComplexGeneric: i.i.d. standard complex Gaussian D, E.
/// ComplexUniformBall(R): a_j, b_j i.i.d. uniform on radius-R balls, D and E
/// recovered through F^H.
Ensemble build_complex_ensemble(const ConstraintScenario& sc, EnsembleTag tag,
                                std::uint64_t seed);

/// RealGeneric: i.i.d. real Gaussian D, E.
/// RealUniformBall(R): a_1 (and a_{n/2+1} for even n) uniform on the real
/// ball, the remaining free rows uniform on the complex ball, the rest filled
/// in by a_j = conj(a_{n+2-j}); D, E are then real up to round-off and are
/// truncated to their real parts.
Ensemble build_real_ensemble(const ConstraintScenario& sc, EnsembleTag tag, std::uint64_t seed);

/// Dispatches on tag.field().
Ensemble build_ensemble(const ConstraintScenario& sc, EnsembleTag tag, std::uint64_t seed);

/// Numerical rank of B (singular values above tol * largest). Diagnostic
/// only; the full-rank/spark conditions hold almost surely and are not enforced.
int numerical_rank(const CMatrix& B, double tol = 1e-10);

}  // namespace blindid
