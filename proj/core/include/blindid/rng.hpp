#pragma once

#include <cstdint>
#include <random>

#include "blindid/types.hpp"

namespace blindid {

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives the seed of child stream `index` from `seed`.
///
/// child = splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15)). Every
/// trial, restart and sweep row owns a child stream, so results never depend
/// on the order in which trials run.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seeded 64-bit generator (mt19937_64 behind a splitmix64-whitened seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent child generator; does not advance this one.
  Rng split(std::uint64_t index) const { return Rng(mix_seed(seed_, index)); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard real normal N(0, 1).
  double normal();
  /// Standard circular complex normal, E|z|^2 = 1.
  Complex complex_normal();

  RVector normal_vector(Index m);
  CVector complex_normal_vector(Index m);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace blindid
