#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erlattice/numeric.hpp"

namespace erl {

inline constexpr int kMaxGround = 16;
inline constexpr int kMaxCanonicalGround = 8;

/// Bit i set <=> ground element i+1 belongs to the set.
using Mask = std::uint32_t;

inline bool proper_subset(Mask a, Mask b) { return a != b && (a & ~b) == 0; }
inline int set_size(Mask m) { return std::popcount(m); }

class Subset {
 public:
  Subset(int n, Mask bits);

  /// Elements are 1-based, in any order, without repetition.
  static Subset from_elements(int n, std::span<const int> elements);

  int ground() const { return n_; }
  Mask bits() const { return bits_; }
  int size() const { return set_size(bits_); }
  std::vector<int> elements() const;

  friend bool operator==(const Subset&, const Subset&) = default;

 private:
  int n_;
  Mask bits_;
};

/// True iff a is a proper subset of b or b of a.
bool comparable(const Subset& a, const Subset& b);

/// An ordered family of distinct subsets of [n], n <= kMaxGround.
///
/// The member sequence is the construction order; every index-based result
/// (colourings, decompositions, partitions) refers to it. Membership queries
/// go through a 2^n-bit characteristic vector kept in step with the sequence.
class SetFamily {
 public:
  explicit SetFamily(int n);
  SetFamily(int n, std::vector<Mask> members);

  int ground() const { return n_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  Mask operator[](std::size_t i) const { return members_[i]; }
  Subset subset(std::size_t i) const { return Subset(n_, members_[i]); }
  const std::vector<Mask>& masks() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool contains(Mask m) const;
  std::optional<std::size_t> index_of(Mask m) const;

  /// Appends m; returns false (and leaves the family unchanged) if present.
  bool add(Mask m);

  SetFamily with(Mask m) const;
  SetFamily without(Mask m) const;
  SetFamily subfamily(std::span<const std::size_t> indices) const;

  /// Same ground size and same set of members, ignoring order.
  bool same_members(const SetFamily& other) const;

  /// Same ground size and identical member sequence.
  friend bool operator==(const SetFamily& a, const SetFamily& b) {
    return a.n_ == b.n_ && a.members_ == b.members_;
  }

 private:
  void check_mask(Mask m) const;

  int n_;
  std::vector<Mask> members_;
  std::vector<std::uint64_t> membership_;
};

struct Degrees {
  std::size_t up = 0;
  std::size_t down = 0;
  std::size_t total() const { return up + down; }
  friend bool operator==(const Degrees&, const Degrees&) = default;
};

/// Up- and down-degree of f in fam; f itself is never counted.
Degrees degrees(const Subset& f, const SetFamily& fam);
Degrees degrees(Mask f, const SetFamily& fam);

/// Per-member longest chain ending at (below) and starting at (above) the
/// member, both counting the member itself.
struct ChainProfile {
  std::vector<int> below;
  std::vector<int> above;
  int height = 0;
};

ChainProfile chain_profile(const SetFamily& fam);

/// Length of the longest chain under strict inclusion; 0 for the empty family.
int height(const SetFamily& fam);

/// One longest chain, bottom first, as member indices.
std::vector<std::size_t> longest_chain(const SetFamily& fam);

struct AntichainDecomposition {
  /// parts[0] holds the maximal elements, parts[1] the maximal elements of
  /// what remains, and so on. Indices within a part ascend.
  std::vector<std::vector<std::size_t>> parts;
  std::size_t height() const { return parts.size(); }
};

AntichainDecomposition mirsky_decompose(const SetFamily& fam);

/// A containment-compatible total order of member indices: sorted by
/// (Mirsky part descending, set size ascending, mask ascending).
struct LinearExtension {
  std::vector<std::size_t> order;
  std::vector<std::size_t> position;  // position[order[p]] == p
};

LinearExtension linear_extension(const SetFamily& fam);

/// Members containing no other member.
SetFamily minimal_sets(const SetFamily& fam);

bool is_antichain(const SetFamily& fam);

/// 2^n-bit characteristic vector, 64 bits per word, least significant first.
using FamilyMask = std::vector<std::uint64_t>;

FamilyMask characteristic(const SetFamily& fam);
SetFamily from_characteristic(int n, const FamilyMask& mask);

/// Least characteristic vector (compared as a 2^n-bit integer) over all
/// relabellings of [n]. n <= kMaxCanonicalGround.
FamilyMask canonical_form(const SetFamily& fam);

/// Word-sized variant for n <= 6 where the characteristic fits in 64 bits.
std::uint64_t canonical_form64(std::uint64_t characteristic, int n);

/// All permutations of [n] as subset relabelling tables: table[p][m] is the
/// image of mask m under permutation p. Cached per n.
const std::vector<std::vector<Mask>>& relabelling_tables(int n);

/// Size of the k-1 largest levels, m_{k-1}. Requires 2 <= k <= n+1.
BigCount m_levels(int n, int k);

/// Inclusive level range [lo, hi] of the j largest levels, ties resolved
/// toward the lower block. Requires 1 <= j <= n+1.
std::pair<int, int> middle_level_range(int n, int j);

}  // namespace erl
