#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "erlattice/lattice.hpp"
#include "erlattice/numeric.hpp"

namespace erl {

struct EngineParams {
  int k = 2;
  Rational epsilon;
  std::uint64_t omega = 0;
  bool epsilon_overridden = false;
  bool omega_overridden = false;
  /// Recheck conservation and (Q1) after every operation. Slow; for tests.
  bool paranoid = false;
  std::size_t colouring_limit = std::size_t{1} << 22U;

  /// epsilon = 1/(500k^2), omega = ceil(4k log2(1/epsilon) / epsilon).
  static EngineParams defaults(int k);
  static std::uint64_t default_omega(int k, const Rational& epsilon);

  void set_epsilon(const Rational& e);
  void set_omega(std::uint64_t w);

  /// "default" or a short description of the overrides.
  std::string regime() const;
};

enum class PartKind { A, U, D, P, R };
std::string to_string(PartKind kind);

enum class Direction { Up, Down, UpDown };

struct Placement {
  PartKind kind = PartKind::A;
  int index = 0;  // R has index 0 until the final stage assigns one
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// One step of a branching operation into a single part.
struct BranchStep {
  int part = 0;
  std::size_t neighbourhood = 0;
  std::size_t j = 0;  // 0: every neighbour took the opposite colour
  bool vacuous = false;
  std::size_t before = 0;
  std::size_t kept = 0;
  double fraction = 0;  // (1 - 2^-eps) 2^(-eps j)
  bool meets_fraction = false;
};

struct LedgerEntry {
  std::string stage;
  std::string op;  // colour, colour-pair, pair-to-P, branch-up, branch-down, branch-up-down
  std::vector<std::size_t> origin;
  bool branch = false;
  std::size_t t = 0;  // sets moved to R by the operation
  BigCount before;
  BigCount after;
  bool applicable = false;  // a branch with t >= omega
  bool within_bound = true; // before/after <= (1/6) 2^(eps t), decided exactly
  std::vector<BranchStep> steps;
};

struct StageSummary {
  std::string stage;
  BigCount before;
  BigCount after;
  std::size_t r_added = 0;
  std::size_t p_added = 0;
  bool within_bound = true;  // shrink <= 2^(eps r_added) 3^(p_added/2)
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string witness;
};

struct VerifyReport {
  std::vector<CheckResult> qualities;   // Q1..Q9
  std::vector<CheckResult> properties;  // P1..P5
  std::vector<CheckResult> extras;      // prospective neighbourhoods, ledger
  BigCount colourings;                  // exact (2,k)-colouring count
  Rational p1_exponent;                 // |A|+|U|+|D|+eps|R|
  std::size_t p1_pairs = 0;             // |P|/2
  bool qualities_pass() const;
  bool properties_pass() const;
  bool ledger_pass() const;
  const CheckResult* find(const std::string& name) const;
};

class PartitionState {
 public:
  /// Mirsky parts A_1..A_{2k-2}, the fixed linear extension and the full
  /// list of (2,k)-colourings. Needs |fam| <= 64.
  static PartitionState initialize(const SetFamily& fam, const EngineParams& params);

  const SetFamily& family() const { return fam_; }
  const EngineParams& params() const { return params_; }
  int stages_done() const { return stages_done_; }

  Placement placement(std::size_t member) const { return place_[member]; }
  /// Members of a part in linear-extension order.
  std::vector<std::size_t> members(PartKind kind, int index) const;
  std::vector<std::size_t> members(PartKind kind) const;
  std::size_t part_size(PartKind kind) const;
  int a_parts() const { return a_parts_; }

  const std::vector<std::uint64_t>& retained() const { return retained_; }
  const std::vector<std::uint64_t>& original() const { return all_; }
  const std::vector<int>& fixed() const { return fixed_; }
  const std::optional<std::vector<std::size_t>>& prospective(std::size_t member) const { return npr_[member]; }
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }
  const std::vector<StageSummary>& stages() const { return summaries_; }
  const std::vector<std::string>& trace() const { return trace_; }
  const LinearExtension& order() const { return ext_; }

  /// Colours member with its most frequent colour (ties to 0), restricts the
  /// retained list and moves it to R. Returns the colour.
  int colour_most_frequent(std::size_t member, const std::string& stage);

  /// Branch from a member with a fixed colour. start is the first part
  /// visited (for UpDown: the up phase starts at start, the down phase at
  /// start + 1). Returns the ledger entry index.
  std::size_t branch_from(std::size_t member, Direction dir, int start, const std::string& stage = "ext");

  void run_stage_I();
  void run_stage_II();
  void run_stage_III();
  void run_stage_IV();
  void run_all();

  VerifyReport verify() const;

  nlohmann::json to_json(const VerifyReport* report = nullptr) const;

  /// Test hook: put a member somewhere without any bookkeeping.
  void force_place(std::size_t member, Placement p) { place_[member] = p; }

 private:
  PartitionState(const SetFamily& fam, const EngineParams& params);

  bool related(std::size_t a, std::size_t b) const;
  std::size_t up_degree(std::size_t f, int part) const;
  std::size_t down_degree(std::size_t f, int part) const;
  std::size_t degree(std::size_t f, int part) const { return up_degree(f, part) + down_degree(f, part); }
  std::vector<std::size_t> neighbours_in_a(std::size_t f, std::initializer_list<int> parts) const;

  void fix(std::size_t member, int colour);
  void restrict_retained();
  void move(std::size_t member, Placement to);
  void to_side(std::size_t member, PartKind kind, int index, std::vector<std::size_t> npr);

  std::size_t branch_steps(std::size_t from, bool up, int start, LedgerEntry& entry, bool& hit_boundary);
  std::size_t branch_pair(std::size_t lower, std::size_t upper, int i0, const std::string& stage);
  void close_branch(LedgerEntry& entry);

  bool shift_up(int max_part);
  void move_to_u_or_d(const std::string& stage);

  void begin_stage(const std::string& name);
  void end_stage();
  void log(const std::string& stage, const std::string& op, const std::string& detail);
  std::string part_sizes() const;
  std::string describe(std::size_t member) const;
  void paranoid_check(const std::string& where) const;

  SetFamily fam_;
  EngineParams params_;
  LinearExtension ext_;
  int a_parts_ = 0;
  int stages_done_ = 0;
  std::vector<Placement> place_;
  std::vector<std::uint64_t> all_;
  std::vector<std::uint64_t> retained_;
  std::vector<int> fixed_;
  std::vector<std::optional<std::vector<std::size_t>>> npr_;
  std::vector<std::uint64_t> entered_;  // sequence number of the last move into U, D or P
  std::uint64_t clock_ = 0;
  std::vector<LedgerEntry> ledger_;
  std::vector<StageSummary> summaries_;
  std::vector<std::string> trace_;
  std::vector<std::uint64_t> comparable_;  // bit j of entry i: members i, j comparable
};

}  // namespace erl
