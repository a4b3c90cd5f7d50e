#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erlattice/lattice.hpp"
#include "erlattice/numeric.hpp"

namespace erl {

inline constexpr int kMaxColours = 64;

/// colors[i] is the colour of member i of the family it was built for.
struct Coloring {
  int r = 0;
  std::vector<int> colors;
};

/// No colour class contains a chain of k sets.
bool is_valid(const SetFamily& fam, const Coloring& c, int k);

/// A monochromatic k-chain (member indices, bottom first), or empty.
std::vector<std::size_t> monochromatic_chain(const SetFamily& fam, const Coloring& c, int k);

enum class CountMethod { Auto, Bruteforce, Backtrack, Layered };

std::string to_string(CountMethod m);
CountMethod parse_count_method(const std::string& name);

struct CountOptions {
  CountMethod method = CountMethod::Auto;
  std::uint64_t bruteforce_budget = std::uint64_t{1} << 32U;  // assignments
  std::uint64_t node_budget = std::uint64_t{1} << 40U;        // backtrack leaves + inner nodes
  bool colour_symmetry = true;
  bool factorise = true;
  int threads = 1;
};

struct CountResult {
  BigCount count;
  // "antichain", "chain-free", "pigeonhole", "bruteforce", "backtrack" or "layered"
  std::string method;
  std::uint64_t nodes = 0;
  std::size_t components = 0;
};

/// Plain enumeration of all r^|fam| assignments against an explicit list of
/// k-chains. Shares no code with the other counters.
BigCount count_bruteforce(const SetFamily& fam, int r, int k,
                          std::uint64_t budget = std::uint64_t{1} << 32U);

/// Number of (r,k)-colourings. An explicitly requested method that does not
/// apply to the family raises CapabilityError; Auto never does.
CountResult count(const SetFamily& fam, int r, int k, const CountOptions& opts = {});

/// 2^{number of minimal sets}: an upper bound on the (2,2)-colourings.
BigCount minimal_set_bound(const SetFamily& fam);

/// Every (2,k)-colouring of fam as a bitmask (bit i = colour of member i),
/// in increasing numeric order. Needs |fam| <= 64.
std::vector<std::uint64_t> two_colourings(const SetFamily& fam, int k,
                                          std::size_t limit = std::size_t{1} << 24U);

/// Members below each member: preds[i] lists j with fam[j] a proper subset of fam[i].
std::vector<std::vector<std::size_t>> strict_predecessors(const SetFamily& fam);

/// Connected components of the comparability graph, each sorted ascending,
/// ordered by smallest member index.
std::vector<std::vector<std::size_t>> comparability_components(const SetFamily& fam);

}  // namespace erl
