#include "erlattice/constructions.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "erlattice/errors.hpp"

namespace erl {
namespace {

std::vector<Mask> level_masks(int n, int level) {
  std::vector<Mask> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (std::popcount(m) == level) out.push_back(static_cast<Mask>(m));
  }
  return out;
}

// Colourings of m items using every colour of a q-set.
BigCount surjections(std::size_t m, int q) {
  if (q == 1) return m > 0 ? 1 : 0;
  return power(std::uint64_t{2}, m) - 2;
}

SetFamily family_of(std::uint64_t characteristic_bits, int n) {
  std::vector<Mask> masks;
  for (std::uint64_t rest = characteristic_bits; rest != 0; rest &= rest - 1) {
    masks.push_back(static_cast<Mask>(std::countr_zero(rest)));
  }
  return SetFamily(n, masks);
}

SetFamily canonical_family(const SetFamily& fam) {
  return from_characteristic(fam.ground(), canonical_form(fam));
}

bool row_before(const ClassRow& a, const ClassRow& b) {
  if (a.count != b.count) return a.count > b.count;
  return characteristic(a.family) < characteristic(b.family);
}

std::string sets_text(const SetFamily& fam) {
  std::string out;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto elems = fam.subset(i).elements();
    out += i ? " {" : "{";
    for (std::size_t x = 0; x < elems.size(); ++x) out += (x ? "," : "") + std::to_string(elems[x]);
    out += "}";
  }
  return out;
}

}  // namespace

// --- paired four-colour construction ------------------------------------------

PairedConstruction paired_four_colouring_family(int n) {
  if (n < 1 || n > kMaxGround) throw UsageError("ground size out of range");
  if (n % 2 == 0) throw UsageError("the paired four-colour construction needs odd n, got " + std::to_string(n));
  std::vector<Mask> lower = level_masks(n, n / 2);
  const std::vector<Mask> upper = level_masks(n, n / 2 + 1);
  PairedConstruction pc{SetFamily(n), lower.size(), upper.size()};
  lower.insert(lower.end(), upper.begin(), upper.end());
  pc.family = SetFamily(n, lower);
  return pc;
}

std::pair<std::array<int, 2>, std::array<int, 2>> paired_scheme(int scheme) {
  if (scheme < 0 || scheme >= 6) throw UsageError("scheme must lie in [0, 6)");
  const int partner = scheme / 2 + 1;
  std::array<int, 2> first{0, partner};
  std::array<int, 2> second{};
  int x = 0;
  for (int c = 1; c < 4; ++c) {
    if (c != partner) second[static_cast<std::size_t>(x++)] = c;
  }
  if (scheme % 2 == 0) return {first, second};
  return {second, first};
}

Coloring paired_colouring(const PairedConstruction& pc, int scheme, std::uint64_t index) {
  const auto [low, high] = paired_scheme(scheme);
  Coloring c{4, std::vector<int>(pc.family.size())};
  for (std::size_t i = 0; i < pc.family.size(); ++i) {
    const auto& pair = i < pc.lower ? low : high;
    c.colors[i] = pair[(index >> i) & 1U];
  }
  return c;
}

void for_each_paired_colouring(const PairedConstruction& pc, const std::function<void(const Coloring&)>& visit) {
  if (pc.family.size() > 40) throw CapabilityError("generator enumeration capped at 40 sets");
  const std::uint64_t per = std::uint64_t{1} << pc.family.size();
  for (int s = 0; s < 6; ++s) {
    for (std::uint64_t idx = 0; idx < per; ++idx) visit(paired_colouring(pc, s, idx));
  }
}

BigCount paired_generated_count(const PairedConstruction& pc) {
  return BigCount(6) * power(std::uint64_t{2}, pc.family.size());
}

BigCount paired_distinct_count(const PairedConstruction& pc) {
  BigCount total = 0;
  for (unsigned x = 1; x < 16; ++x) {
    for (unsigned y = 1; y < 16; ++y) {
      if ((x & y) != 0 || std::popcount(x) > 2 || std::popcount(y) > 2) continue;
      total += surjections(pc.lower, std::popcount(x)) * surjections(pc.upper, std::popcount(y));
    }
  }
  return total;
}

// --- cyclic level assignment ----------------------------------------------------

LevelAssignment level_assignment(int r, int k) {
  if (r < 3 || k < 2) throw UsageError("level assignment needs r >= 3 and k >= 2");
  if ((r * (k - 1)) % 3 != 0) {
    throw CapabilityError("level assignment needs r(k-1) divisible by three; r=" + std::to_string(r) +
                          " k=" + std::to_string(k) + " gives " + std::to_string(r * (k - 1)));
  }
  const int levels = r * (k - 1) / 3;
  LevelAssignment a;
  a.r = r;
  a.k = k;
  a.level_colours.assign(static_cast<std::size_t>(levels), {});
  a.colour_levels.assign(static_cast<std::size_t>(r), {});
  for (int pos = 0; pos < r * (k - 1); ++pos) {
    const int level = pos % levels;
    const int colour = pos / (k - 1);
    a.level_colours[static_cast<std::size_t>(level)].push_back(colour);
    a.colour_levels[static_cast<std::size_t>(colour)].push_back(level);
  }
  return a;
}

std::string check_level_assignment(const LevelAssignment& a) {
  for (std::size_t c = 0; c < a.colour_levels.size(); ++c) {
    std::set<int> distinct(a.colour_levels[c].begin(), a.colour_levels[c].end());
    if (a.colour_levels[c].size() != static_cast<std::size_t>(a.k - 1) || distinct.size() != a.colour_levels[c].size()) {
      return "colour " + std::to_string(c + 1) + " covers " + std::to_string(distinct.size()) +
             " distinct levels, expected " + std::to_string(a.k - 1);
    }
  }
  for (std::size_t l = 0; l < a.level_colours.size(); ++l) {
    std::set<int> distinct(a.level_colours[l].begin(), a.level_colours[l].end());
    if (distinct.size() != 3 || a.level_colours[l].size() != 3) {
      return "level " + std::to_string(l + 1) + " carries " + std::to_string(distinct.size()) + " colours";
    }
  }
  for (std::size_t c = 0; c < a.colour_levels.size(); ++c) {
    for (int l : a.colour_levels[c]) {
      const auto& on = a.level_colours[static_cast<std::size_t>(l)];
      if (std::find(on.begin(), on.end(), static_cast<int>(c)) == on.end()) return "tables disagree";
    }
  }
  return "";
}

AssignedFamily assignment_family(const LevelAssignment& a, int n) {
  const int levels = a.levels();
  if (levels > n + 1) {
    throw UsageError(std::to_string(levels) + " levels do not fit in the lattice of [" + std::to_string(n) + "]");
  }
  const auto [lo, hi] = middle_level_range(n, levels);
  AssignedFamily af{SetFamily(n), {}};
  for (int level = lo; level <= hi; ++level) {
    for (Mask m : level_masks(n, level)) {
      af.family.add(m);
      af.level_of.push_back(level - lo);
    }
  }
  return af;
}

Coloring sample_refining_colouring(const LevelAssignment& a, const AssignedFamily& af, Rng& rng) {
  Coloring c{a.r, std::vector<int>(af.family.size())};
  for (std::size_t i = 0; i < af.family.size(); ++i) {
    const auto& on = a.level_colours[static_cast<std::size_t>(af.level_of[i])];
    c.colors[i] = on[rng.below(on.size())];
  }
  return c;
}

BigCount refining_count(const AssignedFamily& af) { return power(std::uint64_t{3}, af.family.size()); }

// --- exhaustive search ----------------------------------------------------------

std::vector<std::pair<std::uint64_t, std::uint64_t>> isomorphism_classes(int n) {
  if (n < 1 || n > 4) throw CapabilityError("exhaustive enumeration needs 1 <= n <= 4, got " + std::to_string(n));
  const std::uint64_t total = std::uint64_t{1} << (1U << n);
  std::map<std::uint64_t, std::uint64_t> sizes;
  for (std::uint64_t c = 0; c < total; ++c) ++sizes[canonical_form64(c, n)];
  return {sizes.begin(), sizes.end()};
}

SearchReport exhaustive_search(int n, int r, int k, int threads) {
  if (r < 1 || r > kMaxColours || k < 2) throw UsageError("need 1 <= r <= 64 and k >= 2");
  const auto classes = isomorphism_classes(n);
  SearchReport rep;
  rep.n = n;
  rep.r = r;
  rep.k = k;
  rep.method = "exhaustive";
  rep.classes = classes.size();
  rep.note = "empirical small-n result";
  std::vector<ClassRow> rows(classes.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(classes.size())));
  auto work = [&](int w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < classes.size(); i += static_cast<std::size_t>(workers)) {
      rows[i].family = family_of(classes[i].first, n);
      rows[i].class_size = classes[i].second;
      rows[i].count = count(rows[i].family, r, k).count;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& row : rows) {
    rep.families += row.class_size;
    if (row.count > rep.best) rep.best = row.count;
  }
  for (const auto& row : rows) {
    if (row.count != rep.best) continue;
    rep.maximisers.push_back(row.family);
    BigCount again;
    const BigCount assignments = power(static_cast<std::uint64_t>(r), row.family.size());
    if (assignments <= BigCount(std::uint64_t{1} << 24U)) {
      again = count_bruteforce(row.family, r, k);
      ++rep.recounted;
    } else {
      CountOptions plain;
      plain.method = CountMethod::Backtrack;
      plain.colour_symmetry = false;
      plain.factorise = false;
      again = count(row.family, r, k, plain).count;
    }
    if (again != row.count) rep.verified = false;
  }
  std::sort(rows.begin(), rows.end(), row_before);
  if (n == 4 && rows.size() > 100) rows.resize(100);
  rep.rows = std::move(rows);
  return rep;
}

// --- local search -------------------------------------------------------------

SearchReport local_search(int n, int r, int k, const LocalSearchOptions& opts) {
  if (n < 1 || n > 7) throw CapabilityError("local search needs 1 <= n <= 7, got " + std::to_string(n));
  if (r < 1 || r > kMaxColours || k < 2) throw UsageError("need 1 <= r <= 64 and k >= 2");
  if (opts.restarts < 1) throw UsageError("need at least one restart");
  SearchReport rep;
  rep.n = n;
  rep.r = r;
  rep.k = k;
  rep.method = "local";
  rep.seed = opts.seed;
  rep.note = "heuristic, no optimality claim";
  const std::uint64_t subsets = std::uint64_t{1} << n;
  Rng rng(opts.seed);
  std::vector<char> best_members;
  bool have_best = false;

  auto build = [&](const std::vector<char>& in) {
    SetFamily fam(n);
    for (std::uint64_t m = 0; m < subsets; ++m) {
      if (in[m]) fam.add(static_cast<Mask>(m));
    }
    return fam;
  };
  auto evaluate = [&](const std::vector<char>& in, BigCount& out) {
    if (rep.evaluations >= opts.budget) {
      rep.partial = true;
      return false;
    }
    ++rep.evaluations;
    out = count(build(in), r, k).count;
    return true;
  };

  for (int restart = 0; restart < opts.restarts && !rep.partial; ++restart) {
    std::vector<char> cur(subsets, 0);
    if (restart == 0 && opts.start_middle) {
      const int j = std::min(k - 1, n + 1);
      for (Mask m : middle_levels(n, j)) cur[m] = 1;
    } else {
      for (std::uint64_t m = 0; m < subsets; ++m) cur[m] = rng.bernoulli(0.5) ? 1 : 0;
    }
    BigCount cur_count;
    if (!evaluate(cur, cur_count)) break;
    while (true) {
      std::optional<std::uint64_t> move;
      BigCount move_count = cur_count;
      for (std::uint64_t m = 0; m < subsets; ++m) {
        cur[m] ^= 1;
        BigCount c;
        const bool ok = evaluate(cur, c);
        cur[m] ^= 1;
        if (!ok) break;
        if (c > move_count) {
          move_count = c;
          move = m;
        }
      }
      if (rep.partial || !move) break;
      cur[*move] ^= 1;
      cur_count = move_count;
    }
    if (!have_best || cur_count > rep.best) {
      rep.best = cur_count;
      best_members = cur;
      have_best = true;
    }
  }
  if (have_best) {
    const SetFamily fam = build(best_members);
    rep.maximisers.push_back(canonical_family(fam));
    rep.classes = 1;
    rep.verified = count(rep.maximisers.front(), r, k).count == rep.best;
  }
  return rep;
}

// --- serialisation ------------------------------------------------------------

json search_report_json(const SearchReport& rep) {
  json maximisers = json::array();
  for (const auto& f : rep.maximisers) maximisers.push_back(family_json(f));
  json out{{"n", rep.n},
           {"r", rep.r},
           {"k", rep.k},
           {"method", rep.method},
           {"best", count_json(rep.best)},
           {"maximisers", maximisers},
           {"classes", rep.classes},
           {"verified", rep.verified},
           {"note", rep.note}};
  if (rep.method == "exhaustive") {
    out["families"] = rep.families;
    out["recounted"] = rep.recounted;
    json rows = json::array();
    for (const auto& row : rep.rows) {
      rows.push_back(json{{"family", family_json(row.family)}, {"class_size", row.class_size}, {"count", count_json(row.count)}});
    }
    out["rows"] = rows;
  } else {
    out["seed"] = rep.seed;
    out["partial"] = rep.partial;
    out["evaluations"] = rep.evaluations;
  }
  return out;
}

std::string search_report_csv(const SearchReport& rep) {
  std::ostringstream out;
  out << "family,class_size,count\n";
  if (rep.method == "exhaustive") {
    for (const auto& row : rep.rows) out << '"' << sets_text(row.family) << "\"," << row.class_size << ',' << row.count << '\n';
  } else {
    for (const auto& f : rep.maximisers) out << '"' << sets_text(f) << "\",," << rep.best << '\n';
  }
  return out.str();
}

}  // namespace erl
