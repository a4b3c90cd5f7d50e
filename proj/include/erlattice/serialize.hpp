#pragma once

#include <string>

#include "json.hpp"

#include "erlattice/lattice.hpp"
#include "erlattice/numeric.hpp"

namespace erl {

using nlohmann::json;

/// {"num": "...", "den": "..."}
json rational_json(const Rational& q);
Rational rational_from_json(const json& j);

/// Decimal string.
json count_json(const BigCount& v);

/// Sorted 1-based element list.
json set_json(Mask m, int n);

/// {"n": n, "sets": [...]} in member order.
json family_json(const SetFamily& fam);

/// Parts and other unordered collections: element lists sorted lexicographically.
json sorted_sets_json(const SetFamily& fam);

/// Parses the family file format; rejects duplicates and out-of-range elements.
SetFamily family_from_json(const json& j);

/// Built-in specifiers: all, level:j, middle:j, random:p,seed, file:PATH.
/// mirror selects the upper block of middle:j when n - j is odd.
SetFamily parse_family_spec(const std::string& specifier, int n, bool mirror = false);

SetFamily full_lattice(int n);
SetFamily level_family(int n, int j);

/// Union of the j largest levels; ties go to the lower block unless mirror.
SetFamily middle_levels(int n, int j, bool mirror = false);

/// Each subset independently with probability p, masks visited in increasing order.
SetFamily random_family(int n, double p, std::uint64_t seed);

}  // namespace erl
