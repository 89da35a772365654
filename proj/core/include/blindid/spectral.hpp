#pragma once

#include "blindid/types.hpp"

namespace blindid {

enum class Direction { Forward, Inverse };

/// Unitary DFT. Forward kernel is exp(-2*pi*i*j*k/n)/sqrt(n); Inverse is its
/// conjugate transpose. Direct O(n^2) evaluation.
///
/// Throws std::invalid_argument on an empty or non-finite input.
CVector dft(const CVector& v, Direction direction = Direction::Forward);

/// Applies dft() to every column of `X` (i.e. returns F*X or F^H*X).
CMatrix dft_columns(const CMatrix& X, Direction direction = Direction::Forward);

/// The n-by-n unitary DFT matrix F.
CMatrix dft_matrix(Index n);

/// z[k] = sum_j u[j] * v[(k - j) mod n], evaluated as the direct double sum.
CVector circular_convolve(const CVector& u, const CVector& v);

/// sqrt(n) * F^H [(F u) .* (F v)]; agrees with circular_convolve().
CVector circular_convolve_spectral(const CVector& u, const CVector& v);

}  // namespace blindid
