#pragma once

#include <cstdint>
#include <random>

namespace erl {

/// The named 64-bit generator behind every seeded operation: mt19937_64,
/// seeded through one splitmix64 step. Bounded draws avoid
/// std::uniform_int_distribution so streams agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// True with probability p (clamped to [0, 1]).
  bool bernoulli(double p);

  static std::uint64_t splitmix64(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
};

}  // namespace erl
