#include "erlattice/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "erlattice/errors.hpp"
#include "erlattice/random.hpp"

namespace erl {
namespace {

int parse_int(const std::string& text, const std::string& what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError("bad " + what + " '" + text + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError("bad " + what + " '" + text + "'");
  return value;
}

}  // namespace

json rational_json(const Rational& q) {
  return json{{"num", numerator_of(q).str()}, {"den", denominator_of(q).str()}};
}

Rational rational_from_json(const json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw UsageError("rational must be {num, den}");
  return parse_rational(j.at("num").get<std::string>() + "/" + j.at("den").get<std::string>());
}

json count_json(const BigCount& v) { return to_decimal(v); }

json set_json(Mask m, int n) { return Subset(n, m).elements(); }

json family_json(const SetFamily& fam) {
  json sets = json::array();
  for (Mask m : fam) sets.push_back(set_json(m, fam.ground()));
  return json{{"n", fam.ground()}, {"sets", sets}};
}

json sorted_sets_json(const SetFamily& fam) {
  std::vector<std::vector<int>> lists;
  lists.reserve(fam.size());
  for (Mask m : fam) lists.push_back(Subset(fam.ground(), m).elements());
  std::sort(lists.begin(), lists.end());
  return lists;
}

SetFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("sets")) {
    throw UsageError("family file must be an object with \"n\" and \"sets\"");
  }
  if (!j.at("n").is_number_integer()) throw UsageError("family \"n\" must be an integer");
  const int n = j.at("n").get<int>();
  SetFamily fam(n);
  if (!j.at("sets").is_array()) throw UsageError("family \"sets\" must be an array");
  for (const auto& s : j.at("sets")) {
    if (!s.is_array()) throw UsageError("each set must be an array of elements");
    std::vector<int> elems;
    for (const auto& e : s) {
      if (!e.is_number_integer()) throw UsageError("set elements must be integers");
      elems.push_back(e.get<int>());
    }
    if (!std::is_sorted(elems.begin(), elems.end())) throw UsageError("set elements must be sorted");
    const Subset sub = Subset::from_elements(n, elems);
    if (!fam.add(sub.bits())) throw UsageError("duplicate set in family file");
  }
  return fam;
}

SetFamily full_lattice(int n) {
  SetFamily fam(n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) fam.add(static_cast<Mask>(m));
  return fam;
}

SetFamily level_family(int n, int j) {
  SetFamily fam(n);
  if (j < 0 || j > n) throw UsageError("level must lie in [0, n]");
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (std::popcount(m) == j) fam.add(static_cast<Mask>(m));
  }
  return fam;
}

SetFamily middle_levels(int n, int j, bool mirror) {
  auto [lo, hi] = middle_level_range(n, j);
  if (mirror) {
    const int mlo = n - hi;
    hi = n - lo;
    lo = mlo;
  }
  SetFamily fam(n);
  for (int level = lo; level <= hi; ++level) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      if (std::popcount(m) == level) fam.add(static_cast<Mask>(m));
    }
  }
  return fam;
}

SetFamily random_family(int n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("inclusion probability must lie in [0, 1]");
  SetFamily fam(n);
  Rng rng(seed);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (rng.bernoulli(p)) fam.add(static_cast<Mask>(m));
  }
  return fam;
}

SetFamily parse_family_spec(const std::string& specifier, int n, bool mirror) {
  if (specifier.rfind("file:", 0) == 0) {
    const std::string path = specifier.substr(5);
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open family file '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError("malformed family file '" + path + "': " + e.what());
    }
    SetFamily fam = family_from_json(j);
    if (n > 0 && fam.ground() != n) {
      throw UsageError("family file has n=" + std::to_string(fam.ground()) + " but --n is " + std::to_string(n));
    }
    return fam;
  }
  if (n < 1) throw UsageError("a built-in family specifier needs --n");
  if (specifier == "all") return full_lattice(n);
  const auto colon = specifier.find(':');
  if (colon == std::string::npos) throw UsageError("unknown family specifier '" + specifier + "'");
  const std::string kind = specifier.substr(0, colon);
  const std::string arg = specifier.substr(colon + 1);
  if (kind == "level") return level_family(n, parse_int(arg, "level"));
  if (kind == "middle") return middle_levels(n, parse_int(arg, "level count"), mirror);
  if (kind == "random") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw UsageError("random specifier needs 'random:p,seed'");
    double p = 0;
    try {
      std::size_t used = 0;
      p = std::stod(arg.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("bad probability in '" + specifier + "'");
    }
    return random_family(n, p, parse_u64(arg.substr(comma + 1), "seed"));
  }
  throw UsageError("unknown family specifier '" + specifier + "'");
}

}  // namespace erl
