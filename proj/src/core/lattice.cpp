#include "erlattice/lattice.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

#include "erlattice/errors.hpp"

namespace erl {
namespace {

void check_ground(int n) {
  if (n < 1 || n > kMaxGround) {
    throw UsageError("ground size must lie in [1, " + std::to_string(kMaxGround) + "], got " +
                     std::to_string(n));
  }
}

Mask full_mask(int n) { return n >= 32 ? ~Mask{0} : ((Mask{1} << n) - 1); }

// Longest-chain lengths by pairwise comparison, for families that are small
// relative to 2^n.
ChainProfile profile_pairwise(const SetFamily& fam) {
  const std::size_t count = fam.size();
  std::vector<std::size_t> by_size(count);
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return set_size(fam[a]) < set_size(fam[b]);
  });
  ChainProfile p;
  p.below.assign(count, 1);
  p.above.assign(count, 1);
  for (std::size_t x = 0; x < count; ++x) {
    const std::size_t i = by_size[x];
    for (std::size_t y = 0; y < x; ++y) {
      const std::size_t j = by_size[y];
      if (proper_subset(fam[j], fam[i])) p.below[i] = std::max(p.below[i], p.below[j] + 1);
    }
  }
  for (std::size_t x = count; x-- > 0;) {
    const std::size_t i = by_size[x];
    for (std::size_t y = x + 1; y < count; ++y) {
      const std::size_t j = by_size[y];
      if (proper_subset(fam[i], fam[j])) p.above[i] = std::max(p.above[i], p.above[j] + 1);
    }
  }
  for (int b : p.below) p.height = std::max(p.height, b);
  return p;
}

// Same quantities by dynamic programming over all 2^n masks; linear in
// 2^n * n, which wins for dense families.
ChainProfile profile_lattice(const SetFamily& fam) {
  const int n = fam.ground();
  const std::size_t universe = std::size_t{1} << n;
  std::vector<int> below_at(universe, 0);
  std::vector<int> best_down(universe, 0);  // longest chain of members inside m
  for (std::size_t m = 0; m < universe; ++m) {
    int strict = 0;
    for (int i = 0; i < n; ++i) {
      if (m & (std::size_t{1} << i)) strict = std::max(strict, best_down[m ^ (std::size_t{1} << i)]);
    }
    if (fam.contains(static_cast<Mask>(m))) {
      below_at[m] = strict + 1;
      best_down[m] = strict + 1;
    } else {
      best_down[m] = strict;
    }
  }
  std::vector<int> above_at(universe, 0);
  std::vector<int> best_up(universe, 0);
  for (std::size_t m = universe; m-- > 0;) {
    int strict = 0;
    for (int i = 0; i < n; ++i) {
      if (!(m & (std::size_t{1} << i))) strict = std::max(strict, best_up[m | (std::size_t{1} << i)]);
    }
    if (fam.contains(static_cast<Mask>(m))) {
      above_at[m] = strict + 1;
      best_up[m] = strict + 1;
    } else {
      best_up[m] = strict;
    }
  }
  ChainProfile p;
  p.below.reserve(fam.size());
  p.above.reserve(fam.size());
  for (Mask m : fam) {
    p.below.push_back(below_at[m]);
    p.above.push_back(above_at[m]);
    p.height = std::max(p.height, below_at[m]);
  }
  return p;
}

}  // namespace

Subset::Subset(int n, Mask bits) : n_(n), bits_(bits) {
  check_ground(n);
  if ((bits & ~full_mask(n)) != 0) {
    throw UsageError("subset has elements beyond the ground size " + std::to_string(n));
  }
}

Subset Subset::from_elements(int n, std::span<const int> elements) {
  check_ground(n);
  Mask bits = 0;
  for (int e : elements) {
    if (e < 1 || e > n) {
      throw UsageError("element " + std::to_string(e) + " outside [1.." + std::to_string(n) + "]");
    }
    const Mask bit = Mask{1} << (e - 1);
    if (bits & bit) throw UsageError("element " + std::to_string(e) + " repeated within a set");
    bits |= bit;
  }
  return Subset(n, bits);
}

std::vector<int> Subset::elements() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i) {
    if (bits_ & (Mask{1} << i)) out.push_back(i + 1);
  }
  return out;
}

bool comparable(const Subset& a, const Subset& b) {
  if (a.ground() != b.ground()) throw UsageError("comparable: subsets over different ground sizes");
  return proper_subset(a.bits(), b.bits()) || proper_subset(b.bits(), a.bits());
}

SetFamily::SetFamily(int n) : n_(n) {
  check_ground(n);
  membership_.assign(((std::size_t{1} << n) + 63) / 64, 0);
}

SetFamily::SetFamily(int n, std::vector<Mask> members) : SetFamily(n) {
  members_.reserve(members.size());
  for (Mask m : members) {
    if (!add(m)) throw UsageError("duplicate set in family");
  }
}

void SetFamily::check_mask(Mask m) const {
  if ((m & ~full_mask(n_)) != 0) {
    throw UsageError("set has elements beyond the ground size " + std::to_string(n_));
  }
}

bool SetFamily::contains(Mask m) const {
  if ((m & ~full_mask(n_)) != 0) return false;
  return (membership_[m >> 6U] >> (m & 63U)) & 1U;
}

std::optional<std::size_t> SetFamily::index_of(Mask m) const {
  if (!contains(m)) return std::nullopt;
  const auto it = std::find(members_.begin(), members_.end(), m);
  return static_cast<std::size_t>(it - members_.begin());
}

bool SetFamily::add(Mask m) {
  check_mask(m);
  if (contains(m)) return false;
  members_.push_back(m);
  membership_[m >> 6U] |= std::uint64_t{1} << (m & 63U);
  return true;
}

SetFamily SetFamily::with(Mask m) const {
  SetFamily out = *this;
  out.add(m);
  return out;
}

SetFamily SetFamily::without(Mask m) const {
  SetFamily out(n_);
  for (Mask x : members_) {
    if (x != m) out.add(x);
  }
  return out;
}

SetFamily SetFamily::subfamily(std::span<const std::size_t> indices) const {
  SetFamily out(n_);
  for (std::size_t i : indices) {
    if (i >= members_.size()) throw UsageError("subfamily index out of range");
    if (!out.add(members_[i])) throw UsageError("subfamily index repeated");
  }
  return out;
}

bool SetFamily::same_members(const SetFamily& other) const {
  return n_ == other.n_ && membership_ == other.membership_;
}

Degrees degrees(Mask f, const SetFamily& fam) {
  Degrees d;
  for (Mask g : fam) {
    if (proper_subset(f, g)) ++d.up;
    if (proper_subset(g, f)) ++d.down;
  }
  return d;
}

Degrees degrees(const Subset& f, const SetFamily& fam) {
  if (f.ground() != fam.ground()) throw UsageError("degrees: subset and family over different ground sizes");
  return degrees(f.bits(), fam);
}

ChainProfile chain_profile(const SetFamily& fam) {
  const std::size_t count = fam.size();
  const std::size_t lattice_cost = (std::size_t{1} << fam.ground()) * static_cast<std::size_t>(fam.ground());
  if (count * count <= 2 * lattice_cost) return profile_pairwise(fam);
  return profile_lattice(fam);
}

int height(const SetFamily& fam) { return chain_profile(fam).height; }

std::vector<std::size_t> longest_chain(const SetFamily& fam) {
  const ChainProfile p = chain_profile(fam);
  std::vector<std::size_t> chain;
  if (fam.empty()) return chain;
  std::size_t top = 0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    if (p.below[i] == p.height) {
      top = i;
      break;
    }
  }
  chain.push_back(top);
  while (p.below[chain.back()] > 1) {
    const std::size_t cur = chain.back();
    for (std::size_t j = 0; j < fam.size(); ++j) {
      if (proper_subset(fam[j], fam[cur]) && p.below[j] == p.below[cur] - 1) {
        chain.push_back(j);
        break;
      }
    }
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

AntichainDecomposition mirsky_decompose(const SetFamily& fam) {
  const ChainProfile p = chain_profile(fam);
  AntichainDecomposition d;
  d.parts.resize(static_cast<std::size_t>(p.height));
  for (std::size_t i = 0; i < fam.size(); ++i) {
    d.parts[static_cast<std::size_t>(p.above[i] - 1)].push_back(i);
  }
  return d;
}

LinearExtension linear_extension(const SetFamily& fam) {
  const ChainProfile p = chain_profile(fam);
  LinearExtension ext;
  ext.order.resize(fam.size());
  std::iota(ext.order.begin(), ext.order.end(), std::size_t{0});
  std::sort(ext.order.begin(), ext.order.end(), [&](std::size_t a, std::size_t b) {
    if (p.above[a] != p.above[b]) return p.above[a] > p.above[b];
    if (set_size(fam[a]) != set_size(fam[b])) return set_size(fam[a]) < set_size(fam[b]);
    return fam[a] < fam[b];
  });
  ext.position.assign(fam.size(), 0);
  for (std::size_t pos = 0; pos < ext.order.size(); ++pos) ext.position[ext.order[pos]] = pos;
  return ext;
}

SetFamily minimal_sets(const SetFamily& fam) {
  const ChainProfile p = chain_profile(fam);
  SetFamily out(fam.ground());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    if (p.below[i] == 1) out.add(fam[i]);
  }
  return out;
}

bool is_antichain(const SetFamily& fam) { return height(fam) <= 1; }

FamilyMask characteristic(const SetFamily& fam) {
  FamilyMask mask(((std::size_t{1} << fam.ground()) + 63) / 64, 0);
  for (Mask m : fam) mask[m >> 6U] |= std::uint64_t{1} << (m & 63U);
  return mask;
}

SetFamily from_characteristic(int n, const FamilyMask& mask) {
  SetFamily fam(n);
  const std::size_t universe = std::size_t{1} << n;
  if (mask.size() * 64 < universe) throw UsageError("characteristic vector too short");
  for (std::size_t m = 0; m < universe; ++m) {
    if ((mask[m >> 6U] >> (m & 63U)) & 1U) fam.add(static_cast<Mask>(m));
  }
  return fam;
}

const std::vector<std::vector<Mask>>& relabelling_tables(int n) {
  if (n < 1 || n > kMaxCanonicalGround) {
    throw CapabilityError("relabelling tables are limited to n <= " + std::to_string(kMaxCanonicalGround));
  }
  static std::mutex guard;
  static std::map<int, std::vector<std::vector<Mask>>> cache;
  const std::lock_guard<std::mutex> lock(guard);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<std::vector<Mask>> tables;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  const std::size_t universe = std::size_t{1} << n;
  do {
    std::vector<Mask> table(universe);
    for (std::size_t m = 0; m < universe; ++m) {
      Mask image = 0;
      for (int i = 0; i < n; ++i) {
        if (m & (std::size_t{1} << i)) image |= Mask{1} << perm[static_cast<std::size_t>(i)];
      }
      table[m] = image;
    }
    tables.push_back(std::move(table));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cache.emplace(n, std::move(tables)).first->second;
}

FamilyMask canonical_form(const SetFamily& fam) {
  const int n = fam.ground();
  if (n > kMaxCanonicalGround) {
    throw CapabilityError("canonical_form needs n <= " + std::to_string(kMaxCanonicalGround) + ", got " +
                          std::to_string(n));
  }
  const auto& tables = relabelling_tables(n);
  FamilyMask best;
  FamilyMask image(((std::size_t{1} << n) + 63) / 64);
  auto less = [](const FamilyMask& a, const FamilyMask& b) {
    for (std::size_t w = a.size(); w-- > 0;) {
      if (a[w] != b[w]) return a[w] < b[w];
    }
    return false;
  };
  for (const auto& table : tables) {
    std::fill(image.begin(), image.end(), 0);
    for (Mask m : fam) {
      const Mask t = table[m];
      image[t >> 6U] |= std::uint64_t{1} << (t & 63U);
    }
    if (best.empty() || less(image, best)) best = image;
  }
  return best;
}

std::uint64_t canonical_form64(std::uint64_t characteristic_bits, int n) {
  if (n < 1 || n > 6) throw UsageError("canonical_form64 needs 1 <= n <= 6");
  const auto& tables = relabelling_tables(n);
  std::uint64_t best = UINT64_MAX;
  for (const auto& table : tables) {
    std::uint64_t image = 0;
    std::uint64_t rest = characteristic_bits;
    while (rest != 0) {
      const int m = std::countr_zero(rest);
      rest &= rest - 1;
      image |= std::uint64_t{1} << table[static_cast<std::size_t>(m)];
    }
    best = std::min(best, image);
  }
  return best;
}

BigCount m_levels(int n, int k) {
  if (k < 2 || k > n + 1) {
    throw UsageError("m_levels needs 2 <= k <= n+1, got n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  const auto [lo, hi] = middle_level_range(n, k - 1);
  BigCount total = 0;
  for (int i = lo; i <= hi; ++i) total += binomial(n, i);
  return total;
}

std::pair<int, int> middle_level_range(int n, int j) {
  if (j < 1 || j > n + 1) {
    throw UsageError("need 1 <= j <= n+1 levels, got n=" + std::to_string(n) + " j=" + std::to_string(j));
  }
  return {(n - j + 1) / 2, (n + j - 1) / 2};
}

}  // namespace erl
