#include "erlattice/coloring.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "erlattice/errors.hpp"

namespace erl {
namespace {

void check_rk(int r, int k) {
  if (r < 1 || r > kMaxColours) {
    throw UsageError("r must lie in [1, " + std::to_string(kMaxColours) + "], got " + std::to_string(r));
  }
  if (k < 1) throw UsageError("k must be at least 1, got " + std::to_string(k));
}

// r^N <= budget, computed without overflow.
bool within_budget(int r, std::size_t n, std::uint64_t budget) {
  unsigned __int128 total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= static_cast<unsigned>(r);
    if (total > budget) return false;
  }
  return true;
}

// --- brute force -------------------------------------------------------------

std::vector<std::vector<std::size_t>> all_k_chains(const SetFamily& fam, int k) {
  const std::size_t count = fam.size();
  std::vector<std::vector<std::size_t>> ups(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (proper_subset(fam[i], fam[j])) ups[i].push_back(j);
    }
  }
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::size_t> cur;
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == k) {
      chains.push_back(cur);
      if (chains.size() > 50'000'000) throw CapabilityError("too many k-chains for brute force");
      return;
    }
    for (std::size_t j : ups[cur.back()]) {
      cur.push_back(j);
      self(self);
      cur.pop_back();
    }
  };
  for (std::size_t i = 0; i < count; ++i) {
    cur.assign(1, i);
    extend(extend);
  }
  return chains;
}

// --- backtracking ------------------------------------------------------------

// One comparability component in linear-extension order. preds[p] holds
// local positions q < p whose set lies strictly below position p's set.
struct Component {
  std::vector<std::size_t> members;
  std::vector<std::vector<std::uint32_t>> preds;
};

class Walker {
 public:
  Walker(const Component& comp, int r, int k, bool symmetry, std::atomic<std::uint64_t>& nodes,
         std::uint64_t node_budget)
      : comp_(comp),
        r_(r),
        k_(k),
        symmetry_(symmetry),
        nodes_(nodes),
        budget_(node_budget),
        colour_(comp.members.size(), -1),
        len_(comp.members.size(), 0),
        best_(comp.members.size() * static_cast<std::size_t>(r), 0) {}

  // Valid prefixes of the given depth, each as a colour vector.
  std::vector<std::vector<int>> prefixes(std::size_t depth) {
    std::vector<std::vector<int>> out;
    walk(0, depth, [&] { out.emplace_back(colour_.begin(), colour_.begin() + static_cast<long>(depth)); });
    return out;
  }

  // Completions of a prefix (empty prefix = whole component).
  std::uint64_t completions(const std::vector<int>& prefix) {
    for (std::size_t p = 0; p < prefix.size(); ++p) {
      prepare(p);
      colour_[p] = prefix[p];
      len_[p] = best_[p * static_cast<std::size_t>(r_) + static_cast<std::size_t>(prefix[p])] + 1;
    }
    std::uint64_t total = 0;
    const std::size_t m = comp_.members.size();
    if (prefix.size() == m) return 1;
    walk(prefix.size(), m - 1, [&] {
      prepare(m - 1);
      total += static_cast<std::uint64_t>(allowed_count(m - 1));
    });
    return total;
  }

 private:
  // Longest same-coloured chain ending below position p, per colour.
  void prepare(std::size_t p) {
    int* best = &best_[p * static_cast<std::size_t>(r_)];
    std::fill(best, best + r_, 0);
    for (std::uint32_t q : comp_.preds[p]) {
      int& b = best[colour_[q]];
      b = std::max(b, len_[q]);
    }
  }

  bool allowed(std::size_t p, int c) const {
    if (symmetry_ && p == 0 && c != 0) return false;
    return best_[p * static_cast<std::size_t>(r_) + static_cast<std::size_t>(c)] + 1 <= k_ - 1;
  }

  int allowed_count(std::size_t p) const {
    int total = 0;
    for (int c = 0; c < r_; ++c) total += allowed(p, c) ? 1 : 0;
    return total;
  }

  void tick() {
    if (nodes_.fetch_add(1, std::memory_order_relaxed) + 1 > budget_) {
      throw CapabilityError("backtrack node budget exceeded");
    }
  }

  // Assigns positions [from, to) in every valid way, calling leaf() for each
  // full assignment of the range.
  template <typename Leaf>
  void walk(std::size_t from, std::size_t to, Leaf&& leaf) {
    if (from == to) {
      tick();
      leaf();
      return;
    }
    std::size_t p = from;
    prepare(p);
    colour_[p] = -1;
    while (true) {
      int c = colour_[p] + 1;
      while (c < r_ && !allowed(p, c)) ++c;
      if (c == r_) {
        colour_[p] = -1;
        if (p == from) return;
        --p;
        continue;
      }
      colour_[p] = c;
      len_[p] = best_[p * static_cast<std::size_t>(r_) + static_cast<std::size_t>(c)] + 1;
      if (p + 1 == to) {
        tick();
        leaf();
        continue;
      }
      ++p;
      prepare(p);
      colour_[p] = -1;
    }
  }

  const Component& comp_;
  int r_;
  int k_;
  bool symmetry_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t budget_;
  std::vector<int> colour_;
  std::vector<int> len_;
  std::vector<int> best_;
};

std::vector<Component> build_components(const SetFamily& fam, bool factorise) {
  const LinearExtension ext = linear_extension(fam);
  std::vector<std::vector<std::size_t>> groups;
  if (factorise) {
    groups = comparability_components(fam);
  } else if (!fam.empty()) {
    groups.emplace_back(fam.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  }
  std::vector<Component> out;
  for (auto& g : groups) {
    std::sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) { return ext.position[a] < ext.position[b]; });
    Component comp;
    comp.members = g;
    comp.preds.resize(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
      for (std::size_t q = 0; q < p; ++q) {
        if (proper_subset(fam[g[q]], fam[g[p]])) comp.preds[p].push_back(static_cast<std::uint32_t>(q));
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

std::uint64_t count_component(const Component& comp, int r, int k, const CountOptions& opts,
                              std::atomic<std::uint64_t>& nodes) {
  const std::size_t m = comp.members.size();
  const bool symmetry = opts.colour_symmetry && r > 1;
  std::uint64_t total = 0;
  if (opts.threads <= 1 || m < 8) {
    Walker w(comp, r, k, symmetry, nodes, opts.node_budget);
    total = w.completions({});
  } else {
    // Split at the first levels of the tree; the sum is order-independent.
    std::size_t depth = 1;
    std::vector<std::vector<int>> work;
    while (true) {
      Walker w(comp, r, k, symmetry, nodes, opts.node_budget);
      work = w.prefixes(depth);
      if (work.size() >= 8 * static_cast<std::size_t>(opts.threads) || depth + 2 >= m) break;
      ++depth;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(opts.threads), work.size());
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          Walker w(comp, r, k, symmetry, nodes, opts.node_budget);
          for (std::size_t i = t; i < work.size(); i += workers) partial[t] += w.completions(work[i]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::uint64_t v : partial) total += v;
  }
  return total * (symmetry ? static_cast<std::uint64_t>(r) : 1U);
}

CountResult count_backtrack(const SetFamily& fam, int r, int k, const CountOptions& opts) {
  CountResult res;
  res.method = "backtrack";
  res.count = 1;
  std::atomic<std::uint64_t> nodes{0};
  const auto comps = build_components(fam, opts.factorise);
  res.components = comps.size();
  for (const auto& comp : comps) {
    res.count *= count_component(comp, r, k, opts, nodes);
    if (res.count == 0) break;
  }
  res.nodes = nodes.load();
  return res;
}

// --- layered (k = 2, height 2) ----------------------------------------------

CountResult count_layered(const SetFamily& fam, int r, const CountOptions& opts) {
  const ChainProfile prof = chain_profile(fam);
  std::vector<std::size_t> upper;
  std::vector<std::size_t> lower;
  for (std::size_t i = 0; i < fam.size(); ++i) (prof.above[i] == 1 ? upper : lower).push_back(i);
  // Enumerate the smaller level; every set of the other level only needs
  // the number of distinct colours among its neighbours.
  const bool enumerate_upper = upper.size() <= lower.size();
  const auto& side = enumerate_upper ? upper : lower;
  const auto& other = enumerate_upper ? lower : upper;
  if (!within_budget(r, side.size(), opts.bruteforce_budget)) {
    throw CapabilityError("layered count: r^" + std::to_string(side.size()) + " exceeds the enumeration budget");
  }
  std::vector<std::vector<std::uint32_t>> nbrs(other.size());
  for (std::size_t o = 0; o < other.size(); ++o) {
    for (std::size_t s = 0; s < side.size(); ++s) {
      if (proper_subset(fam[other[o]], fam[side[s]]) || proper_subset(fam[side[s]], fam[other[o]])) {
        nbrs[o].push_back(static_cast<std::uint32_t>(s));
      }
    }
  }
  CountResult res;
  res.method = "layered";
  res.components = 1;
  std::vector<int> colour(side.size(), 0);
  // Each product fits 128 bits unless the other level is long; then the
  // terms go through BigCount directly.
  const bool wide = other.size() * static_cast<std::size_t>(std::bit_width(static_cast<unsigned>(r))) > 120;
  BigCount total = 0;
  unsigned __int128 chunk = 0;
  auto flush = [&] {
    total += BigCount(static_cast<std::uint64_t>(chunk >> 64U)) << 64U;
    total += static_cast<std::uint64_t>(chunk);
    chunk = 0;
  };
  std::uint64_t visited = 0;
  while (true) {
    unsigned __int128 prod = 1;
    BigCount big = 1;
    for (const auto& nb : nbrs) {
      std::uint64_t seen = 0;
      for (std::uint32_t s : nb) seen |= std::uint64_t{1} << static_cast<unsigned>(colour[s]);
      const int free = r - std::popcount(seen);
      if (free <= 0) {
        prod = 0;
        big = 0;
        break;
      }
      if (wide) {
        big *= free;
      } else {
        prod *= static_cast<unsigned>(free);
      }
    }
    if (wide) {
      total += big;
    } else {
      chunk += prod;
      if (chunk >> 120U) flush();
    }
    ++visited;
    std::size_t d = 0;
    while (d < colour.size() && ++colour[d] == r) colour[d++] = 0;
    if (d == colour.size()) break;
  }
  flush();
  res.count = total;
  res.nodes = visited;
  return res;
}

bool layered_applies(const SetFamily& fam, int k) { return k == 2 && height(fam) == 2; }

}  // namespace

std::vector<std::size_t> monochromatic_chain(const SetFamily& fam, const Coloring& c, int k) {
  if (c.colors.size() != fam.size()) {
    throw UsageError("colouring has " + std::to_string(c.colors.size()) + " entries for a family of " +
                     std::to_string(fam.size()));
  }
  for (int col : c.colors) {
    if (col < 0 || col >= c.r) throw UsageError("colour index outside [0, r)");
  }
  if (k < 1) throw UsageError("k must be at least 1");
  std::vector<std::size_t> order(fam.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set_size(fam[a]) < set_size(fam[b]); });
  std::vector<int> len(fam.size(), 0);
  std::vector<std::size_t> prev(fam.size(), fam.size());
  for (std::size_t x = 0; x < order.size(); ++x) {
    const std::size_t i = order[x];
    int best = 0;
    for (std::size_t y = 0; y < x; ++y) {
      const std::size_t j = order[y];
      if (c.colors[j] == c.colors[i] && proper_subset(fam[j], fam[i]) && len[j] > best) {
        best = len[j];
        prev[i] = j;
      }
    }
    len[i] = best + 1;
    if (len[i] >= k) {
      std::vector<std::size_t> chain;
      for (std::size_t at = i; at != fam.size(); at = prev[at]) chain.push_back(at);
      std::reverse(chain.begin(), chain.end());
      return chain;
    }
  }
  return {};
}

bool is_valid(const SetFamily& fam, const Coloring& c, int k) { return monochromatic_chain(fam, c, k).empty(); }

std::string to_string(CountMethod m) {
  switch (m) {
    case CountMethod::Auto: return "auto";
    case CountMethod::Bruteforce: return "bruteforce";
    case CountMethod::Backtrack: return "backtrack";
    case CountMethod::Layered: return "layered";
  }
  return "auto";
}

CountMethod parse_count_method(const std::string& name) {
  if (name == "auto") return CountMethod::Auto;
  if (name == "bruteforce") return CountMethod::Bruteforce;
  if (name == "backtrack") return CountMethod::Backtrack;
  if (name == "layered") return CountMethod::Layered;
  throw UsageError("unknown counting method '" + name + "'");
}

BigCount count_bruteforce(const SetFamily& fam, int r, int k, std::uint64_t budget) {
  check_rk(r, k);
  const std::size_t count = fam.size();
  if (!within_budget(r, count, budget)) {
    throw CapabilityError("brute force needs r^" + std::to_string(count) + " assignments, over the budget of " +
                          std::to_string(budget));
  }
  if (count == 0) return 1;
  const auto chains = all_k_chains(fam, k);
  std::vector<std::vector<std::uint32_t>> touching(count);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i : chains[c]) touching[i].push_back(static_cast<std::uint32_t>(c));
  }
  std::vector<int> colour(count, 0);
  std::vector<char> mono(chains.size(), 1);  // all sets start with colour 0
  std::size_t mono_count = chains.size();
  auto refresh = [&](std::size_t element) {
    for (std::uint32_t c : touching[element]) {
      const auto& ch = chains[c];
      char now = 1;
      for (std::size_t x = 1; x < ch.size(); ++x) {
        if (colour[ch[x]] != colour[ch[0]]) {
          now = 0;
          break;
        }
      }
      if (now != mono[c]) {
        mono_count = now ? mono_count + 1 : mono_count - 1;
        mono[c] = now;
      }
    }
  };
  std::uint64_t valid = 0;
  while (true) {
    if (mono_count == 0) ++valid;
    std::size_t d = 0;
    while (d < count) {
      if (++colour[d] == r) {
        colour[d] = 0;
        refresh(d);
        ++d;
      } else {
        refresh(d);
        break;
      }
    }
    if (d == count) break;
  }
  return valid;
}

CountResult count(const SetFamily& fam, int r, int k, const CountOptions& opts) {
  check_rk(r, k);
  switch (opts.method) {
    case CountMethod::Bruteforce: {
      CountResult res;
      res.count = count_bruteforce(fam, r, k, opts.bruteforce_budget);
      res.method = "bruteforce";
      res.components = 1;
      return res;
    }
    case CountMethod::Backtrack:
      return count_backtrack(fam, r, k, opts);
    case CountMethod::Layered:
      if (!layered_applies(fam, k)) {
        throw CapabilityError("layered counting needs k = 2 and a family of height 2");
      }
      return count_layered(fam, r, opts);
    case CountMethod::Auto:
      break;
  }
  const int h = height(fam);
  CountResult res;
  if (h <= k - 1) {
    res.count = power(static_cast<std::uint64_t>(r), fam.size());
    res.method = h <= 1 ? "antichain" : "chain-free";
    return res;
  }
  if (h >= r * (k - 1) + 1) {
    res.count = 0;
    res.method = "pigeonhole";
    return res;
  }
  if (k == 2 && h == 2) {
    std::size_t upper = 0;
    const ChainProfile prof = chain_profile(fam);
    for (int a : prof.above) upper += (a == 1) ? 1 : 0;
    const std::size_t side = std::min(upper, fam.size() - upper);
    if (within_budget(r, side, opts.bruteforce_budget)) return count_layered(fam, r, opts);
  }
  return count_backtrack(fam, r, k, opts);
}

BigCount minimal_set_bound(const SetFamily& fam) {
  return power(std::uint64_t{2}, minimal_sets(fam).size());
}

std::vector<std::uint64_t> two_colourings(const SetFamily& fam, int k, std::size_t limit) {
  if (fam.size() > 64) throw CapabilityError("explicit 2-colouring lists need at most 64 sets");
  if (k < 1) throw UsageError("k must be at least 1");
  const std::size_t m = fam.size();
  const auto preds = strict_predecessors(fam);
  // Members in increasing size, so predecessors are assigned first.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return set_size(fam[a]) < set_size(fam[b]);
  });
  std::vector<std::uint64_t> out;
  std::vector<int> colour(m, -1);
  std::vector<int> len(m, 0);
  auto attempt = [&](std::size_t i, int c) {
    int best = 0;
    for (std::size_t j : preds[i]) {
      if (colour[j] == c) best = std::max(best, len[j]);
    }
    return best + 1;
  };
  auto rec = [&](auto&& self, std::size_t x, std::uint64_t mask) -> void {
    if (x == m) {
      out.push_back(mask);
      if (out.size() > limit) throw CapabilityError("too many 2-colourings to list explicitly");
      return;
    }
    const std::size_t i = order[x];
    for (int c = 0; c < 2; ++c) {
      const int l = attempt(i, c);
      if (l >= k) continue;
      colour[i] = c;
      len[i] = l;
      self(self, x + 1, c ? (mask | (std::uint64_t{1} << i)) : mask);
      colour[i] = -1;
    }
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::size_t>> strict_predecessors(const SetFamily& fam) {
  std::vector<std::vector<std::size_t>> preds(fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = 0; j < fam.size(); ++j) {
      if (proper_subset(fam[j], fam[i])) preds[i].push_back(j);
    }
  }
  return preds;
}

std::vector<std::vector<std::size_t>> comparability_components(const SetFamily& fam) {
  const std::size_t m = fam.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (proper_subset(fam[i], fam[j]) || proper_subset(fam[j], fam[i])) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

}  // namespace erl
