#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "erlattice/errors.hpp"
#include "erlattice/numeric.hpp"
#include "erlattice/random.hpp"

using namespace erl;

TEST_CASE("binomials") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(5, -1) == 0);
  CHECK(binomial(60, 30) == BigCount("118264581564861424"));
  for (int n = 1; n < 30; ++n) {
    for (int k = 1; k < n; ++k) CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
  }
}

TEST_CASE("powers") {
  CHECK(power(std::uint64_t{3}, 6) == 729);
  CHECK(power(std::uint64_t{4}, 10) == 1048576);
  CHECK(power(std::uint64_t{2}, 100) == (BigCount(1) << 100));
  CHECK(power(BigCount(7), 0U) == 1);
}

TEST_CASE("rationals parse and print") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-4") == Rational(-4));
  CHECK(to_string(Rational(2, 4)) == "1/2");
  CHECK(to_string(Rational(5)) == "5");
  CHECK_THROWS_AS(parse_rational("1/0"), UsageError);
  CHECK_THROWS_AS(parse_rational("x"), UsageError);
  CHECK_THROWS_AS(parse_rational("1/"), UsageError);
  CHECK_THROWS_AS(parse_rational(""), UsageError);
  CHECK(numerator_of(Rational(6, 4)) == 3);
  CHECK(denominator_of(Rational(6, 4)) == 2);
}

TEST_CASE("compare_with_pow2 decides exactly") {
  CHECK(compare_with_pow2(Rational(8), Rational(3)) == 0);
  CHECK(compare_with_pow2(Rational(9), Rational(3)) == 1);
  CHECK(compare_with_pow2(Rational(7), Rational(3)) == -1);
  CHECK(compare_with_pow2(Rational(1, 4), Rational(-2)) == 0);
  // 2^(1/2) vs 1414213562/10^9 and its successor
  CHECK(compare_with_pow2(Rational(1414213562, 1000000000), Rational(1, 2)) == -1);
  CHECK(compare_with_pow2(Rational(1414213563, 1000000000), Rational(1, 2)) == 1);
  // 2^(1/2000) is just above 1
  CHECK(compare_with_pow2(Rational(1), Rational(1, 2000)) == -1);
  CHECK(compare_with_pow2(Rational(1000347, 1000000), Rational(1, 2000)) == 1);
  CHECK(compare_with_pow2(Rational(1000346, 1000000), Rational(1, 2000)) == -1);
  CHECK_THROWS_AS(compare_with_pow2(Rational(0), Rational(1)), UsageError);
}

TEST_CASE("compare_with_pow2 agrees with floating point away from ties") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const Rational x(static_cast<long long>(rng.below(100000) + 1), static_cast<long long>(rng.below(1000) + 1));
    const Rational e(static_cast<long long>(rng.below(4000)) - 2000, static_cast<long long>(rng.below(97) + 1));
    const double gap = std::log2(x.convert_to<double>()) - e.convert_to<double>();
    if (std::abs(gap) < 1e-9) continue;
    CHECK(compare_with_pow2(x, e) == (gap > 0 ? 1 : -1));
  }
}

TEST_CASE("rng is reproducible and bounded") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(1);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
  Rng d(2);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += d.bernoulli(0.25) ? 1 : 0;
  CHECK(ones > 2300);
  CHECK(ones < 2700);
  CHECK(Rng::splitmix64(0) != Rng::splitmix64(1));
}
