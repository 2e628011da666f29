#pragma once

#include <cstdint>
#include <cstddef>

#include "gss/linalg.hpp"

namespace gss {

/// SplitMix64 generator. `split(k)` derives an independent stream for row k,
/// so parallel sweeps draw the same numbers regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  Rng split(std::uint64_t stream) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniformly distributed unit vector in ℝ^dim.
  Vec unit_vector(std::size_t dim);

 private:
  std::uint64_t state_;
};

/// Radical-inverse Halton sequence over the first `dim` primes (dim ≤ 64).
class Halton {
 public:
  explicit Halton(std::size_t dim, std::uint64_t skip = 1) : dim_(dim), index_(skip) {}
  Vec next();

 private:
  std::size_t dim_;
  std::uint64_t index_;
};

/// Low-discrepancy unit direction in ℝ^dim from a Halton point mapped through
/// the inverse normal CDF.
Vec halton_direction(const Vec& halton_point);

}  // namespace gss
