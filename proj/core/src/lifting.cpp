#include "blindid/lifting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "blindid/spectral.hpp"

namespace blindid {
namespace {

void check_shape(const Ensemble& ens, const CMatrix& M) {
  if (M.rows() != ens.m1() || M.cols() != ens.m2())
    throw std::invalid_argument("lifted matrix is " + std::to_string(M.rows()) + "x" +
                                std::to_string(M.cols()) + ", ensemble expects " +
                                std::to_string(ens.m1()) + "x" + std::to_string(ens.m2()));
}

}  // namespace

LiftedMatrix::LiftedMatrix(CMatrix M) : M_(std::move(M)) {
  if (!M_.allFinite()) throw std::invalid_argument("lifted matrix has non-finite entries");
}

LiftedMatrix LiftedMatrix::rank_one(const CVector& x, const CVector& y) {
  LiftedMatrix out(x * y.transpose());
  out.factors_ = std::make_pair(x, y);
  return out;
}

MeasurementRecord MeasurementRecord::from_time_domain(CVector z, std::optional<CVector> noise) {
  MeasurementRecord rec;
  rec.z_tilde = dft(z) / std::sqrt(static_cast<double>(z.size()));
  rec.z = std::move(z);
  rec.noise = std::move(noise);
  return rec;
}

CVector apply_A(const Ensemble& ens, const CMatrix& M) {
  check_shape(ens, M);
  const CMatrix W = ens.a.adjoint() * M;  // row j: a_j^H M
  return W.cwiseProduct(ens.b.adjoint()).rowwise().sum();
}

CVector apply_A(const Ensemble& ens, const LiftedMatrix& M) { return apply_A(ens, M.matrix()); }

CVector apply_G(const Ensemble& ens, const CMatrix& M) {
  const CVector spectrum = apply_A(ens, M);
  return std::sqrt(static_cast<double>(ens.n())) * dft(spectrum, Direction::Inverse);
}

CVector apply_G(const Ensemble& ens, const LiftedMatrix& M) { return apply_G(ens, M.matrix()); }

CMatrix apply_A_adjoint(const Ensemble& ens, const CVector& w) {
  if (w.size() != ens.n())
    throw std::invalid_argument("adjoint input has length " + std::to_string(w.size()) +
                                ", expected n = " + std::to_string(ens.n()));
  return ens.a * w.asDiagonal() * ens.b.transpose();
}

CMatrix apply_GstarG(const Ensemble& ens, const CMatrix& M) {
  return static_cast<double>(ens.n()) * apply_A_adjoint(ens, apply_A(ens, M));
}

MeasurementRecord measure(const Ensemble& ens, const CMatrix& M, std::optional<CVector> noise) {
  CVector z = apply_G(ens, M);
  if (noise) {
    if (noise->size() != z.size()) throw std::invalid_argument("noise length must equal n");
    z += *noise;
  }
  return MeasurementRecord::from_time_domain(std::move(z), std::move(noise));
}

CVector vec(const CMatrix& M) { return M.reshaped(); }

CMatrix unvec(const CVector& v, Index m1, Index m2) {
  if (v.size() != m1 * m2) throw std::invalid_argument("unvec: size mismatch");
  return v.reshaped(m1, m2);
}

CMatrix restricted_operator_matrix(const Ensemble& ens, const std::vector<int>& rows,
                                   const std::vector<int>& cols) {
  const Index p = static_cast<Index>(rows.size());
  const Index q = static_cast<Index>(cols.size());
  CMatrix op(ens.n(), p * q);
  for (Index k = 0; k < q; ++k) {
    for (Index i = 0; i < p; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      const int c = cols[static_cast<std::size_t>(k)];
      if (r < 0 || r >= ens.m1() || c < 0 || c >= ens.m2())
        throw std::out_of_range("support index outside the coefficient dimensions");
      op.col(i + k * p) =
          ens.a.row(r).conjugate().transpose().cwiseProduct(ens.b.row(c).conjugate().transpose());
    }
  }
  return op;
}

CMatrix lifted_operator_matrix(const Ensemble& ens) {
  std::vector<int> rows(static_cast<std::size_t>(ens.m1()));
  std::vector<int> cols(static_cast<std::size_t>(ens.m2()));
  for (int i = 0; i < ens.m1(); ++i) rows[static_cast<std::size_t>(i)] = i;
  for (int k = 0; k < ens.m2(); ++k) cols[static_cast<std::size_t>(k)] = k;
  return restricted_operator_matrix(ens, rows, cols);
}

double mean_isometry_radius(int n, int m1, int m2) {
  if (n < 1 || m1 < 1 || m2 < 1) throw std::invalid_argument("dimensions must be positive");
  const double num = static_cast<double>(m1 + 2) * static_cast<double>(m2 + 2);
  return std::pow(num / (static_cast<double>(n) * static_cast<double>(n)), 0.25);
}

double complex_ball_isometry_radius(int n, int m1, int m2) {
  if (n < 1 || m1 < 1 || m2 < 1) throw std::invalid_argument("dimensions must be positive");
  const double num = static_cast<double>(m1 + 1) * static_cast<double>(m2 + 1);
  return std::pow(num / (static_cast<double>(n) * static_cast<double>(n)), 0.25);
}

}  // namespace blindid
