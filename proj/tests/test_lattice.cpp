#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "erlattice/errors.hpp"
#include "erlattice/lattice.hpp"
#include "erlattice/serialize.hpp"
#include "helpers.hpp"

using namespace erl;
using testing_support::fam;
using testing_support::from_bits;

namespace {

Subset sub(int n, std::initializer_list<int> e) {
  const std::vector<int> v(e);
  return Subset::from_elements(n, v);
}

std::vector<std::vector<std::vector<int>>> parts_as_sets(const SetFamily& f, const AntichainDecomposition& d) {
  std::vector<std::vector<std::vector<int>>> out;
  for (const auto& part : d.parts) {
    std::vector<std::vector<int>> sets;
    for (std::size_t i : part) sets.push_back(f.subset(i).elements());
    std::sort(sets.begin(), sets.end());
    out.push_back(sets);
  }
  return out;
}

}  // namespace

TEST_CASE("subsets validate their elements") {
  CHECK(sub(3, {1, 3}).bits() == 0b101U);
  CHECK(sub(3, {}).size() == 0);
  CHECK_THROWS_AS(sub(3, {4}), UsageError);
  CHECK_THROWS_AS(sub(3, {0}), UsageError);
  CHECK_THROWS_AS(sub(3, {2, 2}), UsageError);
  CHECK_THROWS_AS(Subset(2, 0b100), UsageError);
  CHECK_THROWS_AS(Subset(17, 0), UsageError);
  CHECK(sub(4, {4, 1}).elements() == std::vector<int>{1, 4});
}

TEST_CASE("comparable is strict containment either way") {
  CHECK(comparable(sub(2, {1}), sub(2, {1, 2})));
  CHECK(comparable(sub(2, {1, 2}), sub(2, {1})));
  CHECK_FALSE(comparable(sub(2, {1}), sub(2, {2})));
  CHECK_FALSE(comparable(sub(2, {1}), sub(2, {1})));
  CHECK_THROWS_AS(comparable(sub(2, {1}), sub(3, {1, 2})), UsageError);
}

TEST_CASE("set families reject duplicates and keep order") {
  SetFamily f(3);
  CHECK(f.add(0b011));
  CHECK(f.add(0b001));
  CHECK_FALSE(f.add(0b011));
  CHECK(f.size() == 2);
  CHECK(f[0] == 0b011U);
  CHECK(f.contains(0b001));
  CHECK_FALSE(f.contains(0b100));
  CHECK(f.index_of(0b001) == std::optional<std::size_t>(1));
  CHECK_THROWS_AS(SetFamily(3, {1, 2, 1}), UsageError);
  const SetFamily g = f.without(0b011);
  CHECK(g.size() == 1);
  CHECK_FALSE(g.contains(0b011));
  CHECK(f.with(0b100).size() == 3);
  CHECK(SetFamily(3, {1, 3}).same_members(SetFamily(3, {3, 1})));
  CHECK_FALSE(SetFamily(3, {1, 3}) == SetFamily(3, {3, 1}));
}

TEST_CASE("degrees") {
  const SetFamily all2 = full_lattice(2);
  CHECK(degrees(sub(2, {}), all2) == Degrees{3, 0});
  CHECK(degrees(sub(2, {1}), fam(2, {{}, {1}, {2}, {1, 2}})) == Degrees{1, 1});
  CHECK(degrees(sub(2, {1, 2}), fam(2, {{1}, {2}})) == Degrees{0, 2});
  CHECK_THROWS_AS(degrees(sub(3, {1}), all2), UsageError);
}

TEST_CASE("height") {
  CHECK(height(full_lattice(2)) == 3);
  CHECK(height(level_family(5, 2)) == 1);
  CHECK(height(fam(2, {{}, {1}, {2}})) == 2);
  CHECK(height(SetFamily(4)) == 0);
  CHECK(height(full_lattice(6)) == 7);
  const auto c = longest_chain(full_lattice(3));
  REQUIRE(c.size() == 4);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) CHECK(proper_subset(full_lattice(3)[c[i]], full_lattice(3)[c[i + 1]]));
}

TEST_CASE("height agrees between pairwise and lattice profiles") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const SetFamily f = testing_support::random_subfamily(rng, n, 0.05 + 0.9 * static_cast<double>(rng.below(100)) / 100.0);
    // brute force over chains ending at each member
    std::vector<int> best(f.size(), 1);
    std::vector<std::size_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return set_size(f[a]) < set_size(f[b]); });
    int h = 0;
    for (std::size_t x = 0; x < idx.size(); ++x) {
      for (std::size_t y = 0; y < x; ++y) {
        if (proper_subset(f[idx[y]], f[idx[x]])) best[idx[x]] = std::max(best[idx[x]], best[idx[y]] + 1);
      }
      h = std::max(h, best[idx[x]]);
    }
    CHECK(height(f) == h);
    CHECK(chain_profile(f).below == best);
  }
}

TEST_CASE("mirsky decomposition") {
  const SetFamily all2 = full_lattice(2);
  CHECK(parts_as_sets(all2, mirsky_decompose(all2)) ==
        std::vector<std::vector<std::vector<int>>>{{{1, 2}}, {{1}, {2}}, {{}}});
  const SetFamily lvl = level_family(4, 2);
  const auto d = mirsky_decompose(lvl);
  REQUIRE(d.height() == 1);
  CHECK(d.parts[0].size() == 6);
  const SetFamily f = fam(3, {{}, {1}, {1, 2}, {2, 3}});
  CHECK(parts_as_sets(f, mirsky_decompose(f)) ==
        std::vector<std::vector<std::vector<int>>>{{{1, 2}, {2, 3}}, {{1}}, {{}}});
  CHECK(mirsky_decompose(SetFamily(3)).height() == 0);
}

TEST_CASE("mirsky parts are antichains, cover the family and respect part order") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const SetFamily f = testing_support::random_subfamily(rng, n, 0.5);
    const auto d = mirsky_decompose(f);
    CHECK(static_cast<int>(d.height()) == height(f));
    std::vector<int> part_of(f.size(), -1);
    for (std::size_t p = 0; p < d.parts.size(); ++p) {
      CHECK_FALSE(d.parts[p].empty());
      for (std::size_t i : d.parts[p]) {
        CHECK(part_of[i] == -1);
        part_of[i] = static_cast<int>(p);
      }
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(part_of[i] >= 0);
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (proper_subset(f[i], f[j])) CHECK(part_of[i] > part_of[j]);
      }
    }
  }
}

TEST_CASE("linear extension is containment compatible") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 4, 0.6);
    const auto ext = linear_extension(f);
    REQUIRE(ext.order.size() == f.size());
    for (std::size_t p = 0; p < ext.order.size(); ++p) CHECK(ext.position[ext.order[p]] == p);
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (proper_subset(f[i], f[j])) CHECK(ext.position[i] < ext.position[j]);
      }
    }
    // starts with the lowest Mirsky part
    const auto d = mirsky_decompose(f);
    if (!d.parts.empty()) {
      std::set<std::size_t> last(d.parts.back().begin(), d.parts.back().end());
      for (std::size_t p = 0; p < last.size(); ++p) CHECK(last.count(ext.order[p]) == 1);
    }
  }
}

TEST_CASE("minimal sets") {
  CHECK(minimal_sets(full_lattice(2)).same_members(fam(2, {{}})));
  const SetFamily lvl = level_family(4, 2);
  CHECK(minimal_sets(lvl).same_members(lvl));
  CHECK(minimal_sets(fam(3, {{1}, {2}, {1, 2}, {1, 3}})).same_members(fam(3, {{1}, {2}})));
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 4, 0.5);
    const SetFamily m = minimal_sets(f);
    CHECK(is_antichain(m));
    for (Mask g : f) {
      bool covered = false;
      for (Mask x : m) covered = covered || x == g || proper_subset(x, g);
      CHECK(covered);
    }
  }
}

TEST_CASE("canonical form") {
  CHECK(canonical_form(fam(2, {{1}})) == canonical_form(fam(2, {{2}})));
  CHECK(canonical_form(full_lattice(3)) == characteristic(full_lattice(3)));
  CHECK(canonical_form(fam(2, {{1}, {1, 2}})) == canonical_form(fam(2, {{2}, {1, 2}})));
  CHECK(canonical_form(level_family(3, 1)) != canonical_form(level_family(3, 2)));
  CHECK_THROWS_AS(canonical_form(SetFamily(9)), CapabilityError);
}

TEST_CASE("canonical form is invariant under relabelling") {
  Rng rng(21);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const SetFamily f = testing_support::random_subfamily(rng, n, 0.4);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    SetFamily g(n);
    for (Mask m : f) {
      Mask img = 0;
      for (int b = 0; b < n; ++b) {
        if (m & (Mask{1} << b)) img |= Mask{1} << perm[static_cast<std::size_t>(b)];
      }
      g.add(img);
    }
    CHECK(canonical_form(f) == canonical_form(g));
    if (n <= 6) CHECK(canonical_form64(characteristic(f)[0], n) == canonical_form(g)[0]);
  }
}

TEST_CASE("canonical classes at n = 3 partition all families") {
  std::set<std::uint64_t> classes;
  for (std::uint64_t c = 0; c < 256; ++c) classes.insert(canonical_form64(c, 3));
  CHECK(classes.size() == 80);  // isomorphism classes of families of subsets of a 3-set
}

TEST_CASE("Sperner: Mirsky parts never exceed the middle binomial") {
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << (1U << n)); ++c) {
      const SetFamily f = from_bits(n, c);
      for (const auto& part : mirsky_decompose(f).parts) CHECK(BigCount(part.size()) <= binomial(n, n / 2));
    }
  }
  Rng rng(4);
  for (int t = 0; t < 3000; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 4, 0.7);
    for (const auto& part : mirsky_decompose(f).parts) CHECK(part.size() <= 6);
  }
}

TEST_CASE("characteristic round trip") {
  const SetFamily f = fam(5, {{1, 5}, {2}, {}});
  const SetFamily g = from_characteristic(5, characteristic(f));
  CHECK(g.same_members(f));
  CHECK(std::is_sorted(g.begin(), g.end()));
}

TEST_CASE("m_levels") {
  CHECK(m_levels(4, 2) == 6);
  CHECK(m_levels(5, 3) == 20);
  // the formula sums C(3,i) for i in [0, 2]; the whole lattice contains a 4-chain
  CHECK(m_levels(3, 4) == 7);
  CHECK(m_levels(3, 2) == 3);
  CHECK_THROWS_AS(m_levels(3, 1), UsageError);
  CHECK_THROWS_AS(m_levels(3, 5), UsageError);
  for (int n = 1; n <= 8; ++n) {
    for (int k = 2; k <= n + 1; ++k) CHECK(BigCount(middle_levels(n, k - 1).size()) == m_levels(n, k));
  }
}

TEST_CASE("middle level range") {
  CHECK(middle_level_range(4, 1) == std::pair<int, int>{2, 2});
  CHECK(middle_level_range(5, 2) == std::pair<int, int>{2, 3});
  CHECK(middle_level_range(3, 1) == std::pair<int, int>{1, 1});
  CHECK(middle_level_range(3, 4) == std::pair<int, int>{0, 3});
  CHECK_THROWS_AS(middle_level_range(3, 0), UsageError);
  CHECK_THROWS_AS(middle_level_range(3, 5), UsageError);
}
