#include "erlattice/numeric.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "erlattice/errors.hpp"

namespace erl {

BigCount binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigCount result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= (n - k + i);
    result /= i;
  }
  return result;
}

BigCount power(const BigCount& base, unsigned exponent) {
  return boost::multiprecision::pow(base, exponent);
}

BigCount power(std::uint64_t base, std::uint64_t exponent) {
  BigCount result = 1;
  BigCount b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent > 0) b *= b;
  }
  return result;
}

std::string to_decimal(const BigCount& v) { return v.str(); }

BigCount numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
BigCount denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

std::string to_string(const Rational& q) {
  const BigCount den = denominator_of(q);
  if (den == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) -> BigCount {
    if (s.empty()) throw UsageError("malformed rational '" + text + "'");
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) throw UsageError("malformed rational '" + text + "'");
    for (std::size_t j = i; j < s.size(); ++j) {
      if (s[j] < '0' || s[j] > '9') throw UsageError("malformed rational '" + text + "'");
    }
    return BigCount(s);
  };
  if (slash == std::string::npos) return Rational(parse_int(text));
  const BigCount num = parse_int(text.substr(0, slash));
  const BigCount den = parse_int(text.substr(slash + 1));
  if (den == 0) throw UsageError("zero denominator in '" + text + "'");
  return Rational(num, den);
}

double log2_approx(const Rational& q) {
  // Split into mantissa-sized pieces so huge numerators stay finite.
  const BigCount num = numerator_of(q);
  const BigCount den = denominator_of(q);
  auto log2_int = [](const BigCount& v) {
    const std::size_t bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 60) return std::log2(v.convert_to<double>());
    const std::size_t shift = bits - 60;
    const BigCount top = v >> shift;
    return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
  };
  return log2_int(num) - log2_int(den);
}

int compare_with_pow2(const Rational& x, const Rational& e) {
  if (x <= 0) throw UsageError("compare_with_pow2 needs a positive left side");
  const double gap = log2_approx(x) - e.convert_to<double>();
  if (gap > 1e-6) return 1;
  if (gap < -1e-6) return -1;
  // Close call: x <=> 2^(p/q)  <=>  x^q <=> 2^p, with x = a/b: a^q <=> b^q 2^p.
  const BigCount p = numerator_of(e);
  const BigCount q = denominator_of(e);
  if (q > 1'000'000) throw CapabilityError("exponent denominator too large for exact comparison");
  const unsigned qu = q.convert_to<unsigned>();
  const BigCount a = power(numerator_of(x), qu);
  BigCount b = power(denominator_of(x), qu);
  if (p >= 0) {
    b <<= p.convert_to<unsigned>();
    return a < b ? -1 : (a > b ? 1 : 0);
  }
  BigCount lhs = a << (-p).convert_to<unsigned>();
  return lhs < b ? -1 : (lhs > b ? 1 : 0);
}

}  // namespace erl
