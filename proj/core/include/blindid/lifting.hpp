#pragma once

#include <optional>
#include <utility>

#include "blindid/ensembles.hpp"
#include "blindid/types.hpp"

namespace blindid {

/// Lifted unknown M (m1 x m2), optionally carrying rank-one factors M = x y^T.
class LiftedMatrix {
 public:
  LiftedMatrix() = default;
  /// Throws std::invalid_argument on non-finite entries.
  explicit LiftedMatrix(CMatrix M);

  static LiftedMatrix rank_one(const CVector& x, const CVector& y);
  static LiftedMatrix zero(Index m1, Index m2) { return LiftedMatrix(CMatrix::Zero(m1, m2)); }

  const CMatrix& matrix() const noexcept { return M_; }
  Index rows() const noexcept { return M_.rows(); }
  Index cols() const noexcept { return M_.cols(); }
  double norm() const { return M_.norm(); }

  bool has_factors() const noexcept { return factors_.has_value(); }
  const CVector& x() const { return factors_.value().first; }
  const CVector& y() const { return factors_.value().second; }

 private:
  CMatrix M_;
  std::optional<std::pair<CVector, CVector>> factors_;
};

/// Time-domain measurement z, its normalized spectrum z~ = F z / sqrt(n), and
/// the noise that was added (if any).
struct MeasurementRecord {
  CVector z;
  CVector z_tilde;
  std::optional<CVector> noise;

  static MeasurementRecord from_time_domain(CVector z, std::optional<CVector> noise = {});
};

/// G_DE(M); for M = x y^T this is (D x) (*) (E y). General M is handled in the
/// frequency domain as sqrt(n) F^H A(M).
CVector apply_G(const Ensemble& ens, const CMatrix& M);
CVector apply_G(const Ensemble& ens, const LiftedMatrix& M);

/// A(M)_j = a_j^H M conj(b_j) = (1/sqrt(n)) (F G_DE(M))_j.
CVector apply_A(const Ensemble& ens, const CMatrix& M);
CVector apply_A(const Ensemble& ens, const LiftedMatrix& M);

/// A^*(w) = sum_j w_j a_j b_j^T, adjoint under <A, M> = trace(A^H M).
CMatrix apply_A_adjoint(const Ensemble& ens, const CVector& w);

/// G^* G (M) = n A^* A (M).
CMatrix apply_GstarG(const Ensemble& ens, const CMatrix& M);

/// z = G_DE(M) + e packaged with its spectrum.
MeasurementRecord measure(const Ensemble& ens, const CMatrix& M,
                          std::optional<CVector> noise = std::nullopt);

/// Column-major vectorization: vec(M)[i + k*m1] = M(i, k).
CVector vec(const CMatrix& M);
CMatrix unvec(const CVector& v, Index m1, Index m2);

/// n x (m1*m2) matrix of A in the column-major vectorization; entry
/// (j, i + k*m1) is conj(a_j[i]) * conj(b_j[k]).
CMatrix lifted_operator_matrix(const Ensemble& ens);

/// Columns of lifted_operator_matrix() for entries (i, k), i in rows, k in
/// cols, ordered column-major over the sub-block.
CMatrix restricted_operator_matrix(const Ensemble& ens, const std::vector<int>& rows,
                                   const std::vector<int>& cols);

/// ((m1+2)(m2+2)/n^2)^{1/4}, the ball radius that makes G^*G the identity in
/// expectation under the E||a||^2 = m R^2/(m+2) moment.
double mean_isometry_radius(int n, int m1, int m2);

/// ((m1+1)(m2+1)/n^2)^{1/4}. For a_j, b_j uniform on complex balls the second
/// moment is E||a||^2 = m R^2/(m+1), and this radius gives E[G^*G(M)] = M.
double complex_ball_isometry_radius(int n, int m1, int m2);

}  // namespace blindid
