#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "erlattice/coloring.hpp"
#include "erlattice/lattice.hpp"
#include "erlattice/numeric.hpp"

namespace erl {

/// Pairs (F, G) of members with F a proper subset of G.
std::uint64_t comparable_pairs(const SetFamily& fam);

/// Same number, summed from up-degrees.
std::uint64_t comparable_pairs_by_degrees(const SetFamily& fam);

/// ceil((n+1)/2) * max(0, size - C(n, floor(n/2))).
BigCount kleitman_required(int n, std::size_t size);

/// w_k of a set of the given size: min{1/C(n,size), 1/C(n,floor((n-k)/2))}.
/// A binomial that vanishes (n < k) counts as an infinite inverse.
Rational weight_of_size(int n, int size, int k);
Rational weight(const Subset& f, int k);

/// C(n,floor(n/2))^-1 <= w <= (1 + 2k^2/n) C(n,floor(n/2))^-1.
bool weight_within_bounds(int n, int size, int k);

struct WeightReport {
  Rational total;
  bool bounds_checked = false;  // only when n >= 4k^2
  bool bounds_hold = true;
  std::optional<Mask> witness;  // first member outside the bounds
};

Rational family_weight(const SetFamily& fam, int k);
WeightReport family_weight_report(const SetFamily& fam, int k);

/// Sum over F of C(n,|F|)^-1 (1 - d+(F)/(n-|F|)). [n] must not be a member.
Rational lym_sum(const SetFamily& fam);

struct SupersatReport {
  Rational weight;
  Rational r;          // w_k(fam) = 1 + r / C(n, floor(n/2))
  std::uint64_t observed = 0;
  Rational required;   // (1/2 - delta) r n
  bool holds = false;
  bool hypothesis_plausible = false;  // n >= C delta^-3 k^2
  Rational delta;
  Rational constant;
};

SupersatReport supersat_check(const SetFamily& fam, int k, const Rational& delta,
                              const Rational& constant = Rational(1));

struct TransferenceReport {
  bool hypothesis_fired = false;
  bool conclusion_holds = true;  // vacuously true when the hypothesis is off
  Rational size_lhs;             // |F0| + sum alpha_i |F_i|
  BigCount size_rhs;             // m_{k-1} + t
  Rational weight_lhs;
  Rational weight_rhs;           // k - 1 + t / C(n, floor(n/2))
  bool large_n = false;          // n >= 4k^2
};

TransferenceReport transference_check(const SetFamily& f0,
                                      const std::vector<std::pair<Rational, SetFamily>>& others, int k,
                                      std::uint64_t t);

struct McClassification {
  SetFamily b_mc;
  SetFamily a3;
  SetFamily a2;
  SetFamily a1;
};

/// Classifier for a bipartite pair (A, B) under a colouring. c.colors lists
/// the colours of A's members (in order), optionally followed by B's.
/// "d >= sqrt(n)" is evaluated as d*d >= n.
McClassification mc_classification(const SetFamily& a, const SetFamily& b, const SetFamily& x,
                                   const Coloring& c);

}  // namespace erl
