#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "erlattice/coloring.hpp"
#include "erlattice/errors.hpp"
#include "erlattice/serialize.hpp"
#include "helpers.hpp"

using namespace erl;
using testing_support::chain;
using testing_support::fam;
using testing_support::from_bits;

namespace {

// Independent oracle: odometer over all assignments, validity by is_valid.
BigCount naive(const SetFamily& f, int r, int k) {
  std::vector<int> c(f.size(), 0);
  BigCount total = 0;
  while (true) {
    if (is_valid(f, Coloring{r, c}, k)) ++total;
    std::size_t i = 0;
    while (i < c.size() && ++c[i] == r) c[i++] = 0;
    if (i == c.size()) break;
  }
  return total;
}

}  // namespace

TEST_CASE("validity") {
  const SetFamily c3 = chain(2, 3);
  CHECK(is_valid(c3, Coloring{3, {0, 1, 2}}, 2));
  CHECK_FALSE(is_valid(c3, Coloring{3, {0, 1, 0}}, 2));
  CHECK(is_valid(c3, Coloring{1, {0, 0, 0}}, 4));
  CHECK_FALSE(is_valid(full_lattice(2), Coloring{1, {0, 0, 0, 0}}, 3));
  CHECK_THROWS_AS(is_valid(c3, Coloring{3, {0, 1}}, 2), UsageError);
  CHECK_THROWS_AS(is_valid(c3, Coloring{2, {0, 1, 2}}, 2), UsageError);
  const auto w = monochromatic_chain(full_lattice(2), Coloring{2, {0, 1, 0, 0}}, 3);
  REQUIRE(w.size() == 3);
  CHECK(full_lattice(2)[w[0]] == 0U);
  CHECK(full_lattice(2)[w[2]] == 3U);
}

TEST_CASE("any colouring is valid when k exceeds the height") {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 4, 0.5);
    Coloring c{3, std::vector<int>(f.size())};
    for (auto& x : c.colors) x = static_cast<int>(rng.below(3));
    CHECK(is_valid(f, c, height(f) + 1));
  }
}

TEST_CASE("plain enumeration examples") {
  CHECK(count_bruteforce(level_family(4, 2), 3, 2) == 729);
  CHECK(count_bruteforce(full_lattice(2), 2, 2) == 0);
  CHECK(count_bruteforce(full_lattice(2), 2, 3) == 10);
  CHECK(count_bruteforce(SetFamily(3), 5, 2) == 1);
  CHECK_THROWS_AS(count_bruteforce(level_family(6, 3), 4, 2), CapabilityError);
}

TEST_CASE("count examples") {
  for (int r = 1; r <= 4; ++r) {
    const auto res = count(level_family(5, 2), r, 2);
    CHECK(res.count == power(static_cast<std::uint64_t>(r), 10));
    CHECK(res.method == "antichain");
  }
  CHECK(count(chain(2, 3), 3, 2).count == 6);
  CHECK(count(full_lattice(3), 2, 2).method == "pigeonhole");
  CHECK(count(full_lattice(3), 2, 2).count == 0);
  CHECK(count(chain(3, 3), 2, 4).method == "chain-free");
  CHECK(count(chain(3, 3), 2, 4).count == 8);
}

TEST_CASE("two middle levels of n=5 with four colours: layered and backtrack agree") {
  const SetFamily f = middle_levels(5, 2);
  CountOptions layered;
  layered.method = CountMethod::Layered;
  CountOptions backtrack;
  backtrack.method = CountMethod::Backtrack;
  const BigCount a = count(f, 4, 2, layered).count;
  const BigCount b = count(f, 4, 2, backtrack).count;
  CHECK(a == b);
  CHECK(a > power(std::uint64_t{4}, 10));
}

TEST_CASE("explicit methods that do not apply") {
  CountOptions layered;
  layered.method = CountMethod::Layered;
  CHECK_THROWS_AS(count(full_lattice(3), 4, 3, layered), CapabilityError);
  CHECK_THROWS_AS(count(level_family(4, 2), 4, 2, layered), CapabilityError);
  CHECK_THROWS_AS(parse_count_method("magic"), UsageError);
  CHECK(parse_count_method("layered") == CountMethod::Layered);
  CHECK(to_string(CountMethod::Backtrack) == "backtrack");
}

TEST_CASE("layered handles any two-level family, either side smaller") {
  Rng rng(77);
  CountOptions layered;
  layered.method = CountMethod::Layered;
  for (int t = 0; t < 60; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 4, 0.45);
    if (height(f) != 2 || f.size() > 10) continue;
    const int r = 2 + static_cast<int>(rng.below(3));
    CHECK(count(f, r, 2, layered).count == count_bruteforce(f, r, 2));
  }
}

TEST_CASE("counters agree with an independent oracle") {
  Rng rng(2024);
  CountOptions plain;
  plain.method = CountMethod::Backtrack;
  plain.colour_symmetry = false;
  plain.factorise = false;
  CountOptions split = plain;
  split.colour_symmetry = true;
  split.factorise = true;
  split.threads = 3;
  for (int t = 0; t < 150; ++t) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const SetFamily f = testing_support::random_subfamily(rng, n, 0.4);
    if (f.size() > 9) continue;
    const int r = 1 + static_cast<int>(rng.below(4));
    const int k = 2 + static_cast<int>(rng.below(3));
    const BigCount oracle = naive(f, r, k);
    CHECK(count_bruteforce(f, r, k) == oracle);
    CHECK(count(f, r, k).count == oracle);
    CHECK(count(f, r, k, plain).count == oracle);
    CHECK(count(f, r, k, split).count == oracle);
  }
}

TEST_CASE("counts are independent of member order and thread count") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    SetFamily f = testing_support::random_subfamily(rng, 4, 0.6);
    std::vector<Mask> masks = f.masks();
    std::reverse(masks.begin(), masks.end());
    const SetFamily g(4, masks);
    CountOptions one;
    one.method = CountMethod::Backtrack;
    CountOptions many = one;
    many.threads = 4;
    const BigCount a = count(f, 3, 3, one).count;
    CHECK(count(g, 3, 3, one).count == a);
    CHECK(count(f, 3, 3, many).count == a);
  }
}

TEST_CASE("removing a set loses at most a factor r") {
  Rng rng(9);
  for (int t = 0; t < 60; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 3, 0.6);
    if (f.empty()) continue;
    const int r = 2 + static_cast<int>(rng.below(2));
    const BigCount whole = count(f, r, 2).count;
    const SetFamily g = f.without(f[rng.below(f.size())]);
    CHECK(count(g, r, 2).count * r >= whole);
  }
}

TEST_CASE("chain-free families are unconstrained") {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 4, 0.5);
    const int k = height(f) + 1;
    CHECK(count(f, 3, k).count == power(std::uint64_t{3}, f.size()));
  }
}

TEST_CASE("node budget is enforced") {
  CountOptions tiny;
  tiny.method = CountMethod::Backtrack;
  tiny.node_budget = 10;
  CHECK_THROWS_AS(count(middle_levels(4, 2), 3, 2, tiny), CapabilityError);
}

TEST_CASE("minimal set bound") {
  CHECK(minimal_set_bound(full_lattice(2)) == 2);
  CHECK(minimal_set_bound(level_family(4, 2)) == 64);
  CHECK(count(level_family(4, 2), 2, 2).count == 64);
  const SetFamily f = fam(2, {{}, {1}, {2}});
  CHECK(minimal_set_bound(f) == 2);
  CHECK(count_bruteforce(f, 2, 2) == 2);  // empty set one colour, both singletons the other
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << (1U << n)); ++c) {
      const SetFamily g = from_bits(n, c);
      CHECK(minimal_set_bound(g) >= count(g, 2, 2).count);
    }
  }
  Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    const SetFamily g = testing_support::random_subfamily(rng, 4, 0.5);
    CHECK(minimal_set_bound(g) >= count(g, 2, 2).count);
  }
}

TEST_CASE("two_colourings lists exactly the valid colourings") {
  Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    const SetFamily f = testing_support::random_subfamily(rng, 3, 0.5);
    const int k = 2 + static_cast<int>(rng.below(2));
    const auto list = two_colourings(f, k);
    CHECK(std::is_sorted(list.begin(), list.end()));
    std::vector<std::uint64_t> expect;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << f.size()); ++m) {
      Coloring c{2, std::vector<int>(f.size())};
      for (std::size_t i = 0; i < f.size(); ++i) c.colors[i] = static_cast<int>((m >> i) & 1U);
      if (is_valid(f, c, k)) expect.push_back(m);
    }
    CHECK(list == expect);
  }
  CHECK_THROWS_AS(two_colourings(level_family(5, 2), 2, 100), CapabilityError);
}

TEST_CASE("comparability components") {
  const SetFamily f = fam(3, {{1}, {2}, {1, 2}, {3}});
  const auto comps = comparability_components(f);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<std::size_t>{0, 1, 2});
  CHECK(comps[1] == std::vector<std::size_t>{3});
  const auto preds = strict_predecessors(f);
  CHECK(preds[2] == std::vector<std::size_t>{0, 1});
}
