#include "blindid/rng.hpp"

namespace blindid {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double Rng::uniform() {
  // 53 random bits, shifted half a step off zero: lands in (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_(engine_); }

Complex Rng::complex_normal() {
  constexpr double kHalf = 0.70710678118654752440;
  const double re = normal();
  const double im = normal();
  return {kHalf * re, kHalf * im};
}

RVector Rng::normal_vector(Index m) {
  RVector v(m);
  for (Index i = 0; i < m; ++i) v(i) = normal();
  return v;
}

CVector Rng::complex_normal_vector(Index m) {
  CVector v(m);
  for (Index i = 0; i < m; ++i) v(i) = complex_normal();
  return v;
}

}  // namespace blindid
