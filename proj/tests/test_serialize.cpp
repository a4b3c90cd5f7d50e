#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "erlattice/errors.hpp"
#include "erlattice/serialize.hpp"
#include "helpers.hpp"

using namespace erl;

TEST_CASE("family json round trip") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const SetFamily f = testing_support::random_subfamily(rng, n, 0.4);
    const SetFamily g = family_from_json(json::parse(family_json(f).dump()));
    CHECK(g == f);
  }
  const json j = family_json(testing_support::fam(3, {{}, {2, 3}, {1}}));
  CHECK(j.dump() == R"({"n":3,"sets":[[],[2,3],[1]]})");
}

TEST_CASE("malformed family files") {
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"([1,2])")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":"3","sets":[]})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3,"sets":[[1],[1]]})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3,"sets":[[4]]})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3,"sets":[[0]]})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3,"sets":[[2,1]]})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3,"sets":[["a"]]})")), UsageError);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"n":3,"sets":[1]})")), UsageError);
}

TEST_CASE("specifiers") {
  CHECK(parse_family_spec("all", 3).size() == 8);
  CHECK(parse_family_spec("level:2", 4).size() == 6);
  CHECK(parse_family_spec("middle:2", 5).size() == 20);
  CHECK(parse_family_spec("middle:1", 3, true).same_members(level_family(3, 2)));
  const SetFamily r1 = parse_family_spec("random:0.5,7", 4);
  CHECK(r1 == random_family(4, 0.5, 7));
  CHECK(r1 == parse_family_spec("random:0.5,7", 4));
  CHECK(random_family(5, 0.0, 1).empty());
  CHECK(random_family(5, 1.0, 1).size() == 32);
  CHECK_THROWS_AS(parse_family_spec("bogus", 3), UsageError);
  CHECK_THROWS_AS(parse_family_spec("level:x", 3), UsageError);
  CHECK_THROWS_AS(parse_family_spec("level:5", 3), UsageError);
  CHECK_THROWS_AS(parse_family_spec("random:2,1", 3), UsageError);
  CHECK_THROWS_AS(parse_family_spec("all", 0), UsageError);
  CHECK_THROWS_AS(parse_family_spec("file:/nonexistent/family.json", 3), UsageError);
}

TEST_CASE("family files") {
  const std::string path = std::string(ERL_TEST_TMP) + "/serialize_family.json";
  {
    std::ofstream out(path);
    out << R"({"n": 4, "sets": [[1], [1, 2], [3, 4]]})";
  }
  const SetFamily f = parse_family_spec("file:" + path, 0);
  CHECK(f.ground() == 4);
  CHECK(f.size() == 3);
  CHECK(parse_family_spec("file:" + path, 4) == f);
  CHECK_THROWS_AS(parse_family_spec("file:" + path, 5), UsageError);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(parse_family_spec("file:" + path, 0), UsageError);
  std::remove(path.c_str());
}

TEST_CASE("scalar encodings") {
  CHECK(rational_json(Rational(3, 6)).dump() == R"({"den":"2","num":"1"})");
  CHECK(rational_from_json(rational_json(Rational(-7, 3))) == Rational(-7, 3));
  CHECK(count_json(BigCount(1) << 70).get<std::string>() == "1180591620717411303424");
  CHECK(set_json(0b101, 3).dump() == "[1,3]");
  CHECK(sorted_sets_json(testing_support::fam(3, {{2}, {1, 3}, {1}})).dump() == "[[1],[1,3],[2]]");
}
