#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "erlattice/coloring.hpp"
#include "erlattice/lattice.hpp"
#include "erlattice/numeric.hpp"
#include "erlattice/random.hpp"
#include "erlattice/serialize.hpp"

namespace erl {

// --- paired four-colour construction ------------------------------------------

/// Levels floor(n/2) and ceil(n/2) of an odd n. Member order: lower level
/// first, each level by ascending mask.
struct PairedConstruction {
  SetFamily family;
  std::size_t lower = 0;  // members [0, lower) form the lower level
  std::size_t upper = 0;
};

PairedConstruction paired_four_colouring_family(int n);

/// The six colour schemes: scheme s = 2*pairing + orientation. Pairing p
/// joins colour 0 with colour p+1; orientation 0 gives that pair to the
/// lower level.
std::pair<std::array<int, 2>, std::array<int, 2>> paired_scheme(int scheme);

/// Colouring number `index` (< 2^(lower+upper)) of scheme s: bit i picks
/// between the two colours available to member i.
Coloring paired_colouring(const PairedConstruction& pc, int scheme, std::uint64_t index);

/// Calls visit for all 6 * 2^|F| generated colourings, duplicates included.
void for_each_paired_colouring(const PairedConstruction& pc, const std::function<void(const Coloring&)>& visit);

/// 6 * 2^|F|.
BigCount paired_generated_count(const PairedConstruction& pc);

/// Distinct colourings among the generated ones: lower colours X, upper
/// colours Y with X, Y disjoint and |X|, |Y| <= 2.
BigCount paired_distinct_count(const PairedConstruction& pc);

// --- cyclic level assignment ----------------------------------------------------

struct LevelAssignment {
  int r = 0;
  int k = 0;
  /// level_colours[l]: colours (0-based) allowed on level l, l < r(k-1)/3.
  std::vector<std::vector<int>> level_colours;
  /// colour_levels[c]: levels covered by colour c.
  std::vector<std::vector<int>> colour_levels;
  int levels() const { return static_cast<int>(level_colours.size()); }
};

/// Colours take consecutive blocks of k-1 from the list (l_1..l_L) repeated
/// three times, L = r(k-1)/3. Needs r >= 3, k >= 2 and 3 | r(k-1).
LevelAssignment level_assignment(int r, int k);

/// Empty when both invariants hold, otherwise a description of the failure.
std::string check_level_assignment(const LevelAssignment& a);

/// The L middle levels of [n] in ascending level order, with the level
/// index (0..L-1) of each member.
struct AssignedFamily {
  SetFamily family;
  std::vector<int> level_of;
};
AssignedFamily assignment_family(const LevelAssignment& a, int n);

/// Each member receives a uniform choice among its level's colours.
Coloring sample_refining_colouring(const LevelAssignment& a, const AssignedFamily& af, Rng& rng);

/// 3^|F|: the number of refining colourings.
BigCount refining_count(const AssignedFamily& af);

// --- search -----------------------------------------------------------------

struct ClassRow {
  SetFamily family{1};  // canonical representative, masks ascending
  std::uint64_t class_size = 0;
  BigCount count;
};

struct SearchReport {
  int n = 0;
  int r = 0;
  int k = 0;
  std::string method;  // exhaustive | local
  BigCount best;
  std::vector<SetFamily> maximisers;  // canonical representatives
  std::uint64_t classes = 0;          // isomorphism classes examined
  std::uint64_t families = 0;         // sum of class sizes
  bool verified = true;               // every maximiser recounted by an independent path
  std::uint64_t recounted = 0;        // maximisers recounted by plain enumeration
  std::uint64_t seed = 0;
  bool partial = false;
  std::uint64_t evaluations = 0;
  std::string note;
  std::vector<ClassRow> rows;  // all classes for n <= 3, top 100 for n = 4
};

/// Canonical characteristic vectors of every isomorphism class of families
/// over [n] (n <= 4), ascending, with class sizes.
std::vector<std::pair<std::uint64_t, std::uint64_t>> isomorphism_classes(int n);

SearchReport exhaustive_search(int n, int r, int k, int threads = 1);

struct LocalSearchOptions {
  std::uint64_t budget = 2000;  // count evaluations, all restarts together
  std::uint64_t seed = 0;
  int restarts = 1;
  bool start_middle = true;  // first start is the k-1 middle levels, later ones random
};

SearchReport local_search(int n, int r, int k, const LocalSearchOptions& opts);

json search_report_json(const SearchReport& rep);
std::string search_report_csv(const SearchReport& rep);

}  // namespace erl
