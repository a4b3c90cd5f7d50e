#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace erl {

/// Exact non-negative counts (numbers of colourings, binomials, ...).
using BigCount = boost::multiprecision::cpp_int;

/// Exact rationals, always kept in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;

BigCount binomial(int n, int k);
BigCount power(const BigCount& base, unsigned exponent);
BigCount power(std::uint64_t base, std::uint64_t exponent);

std::string to_decimal(const BigCount& v);
std::string to_string(const Rational& q);  // "num/den", or "num" when den == 1

/// Parses "NUM/DEN" or "NUM" (an optional leading '-' is accepted).
Rational parse_rational(const std::string& text);

BigCount numerator_of(const Rational& q);
BigCount denominator_of(const Rational& q);

/// Sign of x - 2^e, decided exactly. x must be positive.
/// Uses a floating estimate when the gap is wide and falls back to
/// comparing x^den(e) with 2^num(e) otherwise.
int compare_with_pow2(const Rational& x, const Rational& e);

/// log2(q) as a double, for human-readable report fields only.
double log2_approx(const Rational& q);

}  // namespace erl
