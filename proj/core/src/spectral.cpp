#include "blindid/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace blindid {
namespace {

void check_signal(const CVector& v) {
  if (v.size() == 0) throw std::invalid_argument("empty vector");
  if (!v.allFinite()) throw std::invalid_argument("non-finite entry in vector");
}

// Twiddles w^k for k = 0..n-1; exponents are reduced mod n before use so the
// table stays exact in the index.
std::vector<Complex> twiddles(Index n, Direction direction) {
  const double sign = direction == Direction::Forward ? -1.0 : 1.0;
  std::vector<Complex> w(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    w[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

}  // namespace

CVector dft(const CVector& v, Direction direction) {
  check_signal(v);
  const Index n = v.size();
  const auto w = twiddles(n, direction);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector out(n);
  for (Index j = 0; j < n; ++j) {
    Complex acc{0.0, 0.0};
    for (Index k = 0; k < n; ++k) acc += w[static_cast<std::size_t>((j * k) % n)] * v(k);
    out(j) = acc * scale;
  }
  return out;
}

CMatrix dft_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("empty vector");
  const auto w = twiddles(n, Direction::Forward);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMatrix F(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) F(j, k) = w[static_cast<std::size_t>((j * k) % n)] * scale;
  return F;
}

CMatrix dft_columns(const CMatrix& X, Direction direction) {
  if (X.rows() == 0) throw std::invalid_argument("empty vector");
  if (!X.allFinite()) throw std::invalid_argument("non-finite entry in vector");
  const CMatrix F = dft_matrix(X.rows());
  return direction == Direction::Forward ? CMatrix(F * X) : CMatrix(F.adjoint() * X);
}

CVector circular_convolve(const CVector& u, const CVector& v) {
  check_signal(u);
  check_signal(v);
  if (u.size() != v.size()) throw std::invalid_argument("circular_convolve: length mismatch");
  const Index n = u.size();
  CVector z = CVector::Zero(n);
  for (Index k = 0; k < n; ++k) {
    Complex acc{0.0, 0.0};
    for (Index j = 0; j < n; ++j) acc += u(j) * v(((k - j) % n + n) % n);
    z(k) = acc;
  }
  return z;
}

CVector circular_convolve_spectral(const CVector& u, const CVector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("circular_convolve: length mismatch");
  const CVector prod = dft(u).cwiseProduct(dft(v));
  return std::sqrt(static_cast<double>(u.size())) * dft(prod, Direction::Inverse);
}

}  // namespace blindid
