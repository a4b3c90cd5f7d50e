#include "erlattice/random.hpp"

#include "erlattice/errors.hpp"

#include <cmath>

namespace erl {

std::uint64_t Rng::splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("Rng::below needs a positive bound");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t v = 0;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) {
    engine_();
    return false;
  }
  if (p >= 1.0) {
    engine_();
    return true;
  }
  const double scaled = std::ldexp(p, 64);
  const auto threshold = static_cast<std::uint64_t>(scaled);
  return engine_() < threshold;
}

}  // namespace erl
