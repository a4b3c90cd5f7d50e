#include "erlattice/partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "erlattice/coloring.hpp"
#include "erlattice/errors.hpp"
#include "erlattice/serialize.hpp"
#include "erlattice/supersat.hpp"

namespace erl {
namespace {

bool bit(std::uint64_t colouring, std::size_t member) { return (colouring >> member) & 1U; }

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

// --- parameters ----------------------------------------------------------------

std::uint64_t EngineParams::default_omega(int k, const Rational& epsilon) {
  const long double eps = epsilon.convert_to<long double>();
  const long double w = 4.0L * k * std::log2(1.0L / eps) / eps;
  return static_cast<std::uint64_t>(std::ceil(w));
}

EngineParams EngineParams::defaults(int k) {
  if (k < 2) throw UsageError("the partition engine needs k >= 2");
  EngineParams p;
  p.k = k;
  p.epsilon = Rational(1, 500 * k * k);
  p.omega = default_omega(k, p.epsilon);
  return p;
}

void EngineParams::set_epsilon(const Rational& e) {
  if (e <= 0 || e >= 1) throw UsageError("epsilon must lie strictly between 0 and 1");
  epsilon = e;
  epsilon_overridden = true;
  if (!omega_overridden) omega = default_omega(k, epsilon);
}

void EngineParams::set_omega(std::uint64_t w) {
  omega = w;
  omega_overridden = true;
}

std::string EngineParams::regime() const {
  if (!epsilon_overridden && !omega_overridden) return "default";
  std::string out = "override";
  if (epsilon_overridden) out += " epsilon=" + to_string(epsilon);
  if (omega_overridden) out += " omega=" + std::to_string(omega);
  return out;
}

std::string to_string(PartKind kind) {
  switch (kind) {
    case PartKind::A: return "A";
    case PartKind::U: return "U";
    case PartKind::D: return "D";
    case PartKind::P: return "P";
    case PartKind::R: return "R";
  }
  return "?";
}

// --- reports ----------------------------------------------------------------

bool VerifyReport::qualities_pass() const {
  return std::all_of(qualities.begin(), qualities.end(), [](const CheckResult& c) { return c.pass; });
}

bool VerifyReport::properties_pass() const {
  return std::all_of(properties.begin(), properties.end(), [](const CheckResult& c) { return c.pass; });
}

bool VerifyReport::ledger_pass() const {
  const CheckResult* c = find("branch-shrink");
  return c == nullptr || c->pass;
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const auto* list : {&qualities, &properties, &extras}) {
    for (const auto& c : *list) {
      if (c.name == name) return &c;
    }
  }
  return nullptr;
}

// --- construction -------------------------------------------------------------

PartitionState::PartitionState(const SetFamily& fam, const EngineParams& params)
    : fam_(fam), params_(params) {}

PartitionState PartitionState::initialize(const SetFamily& fam, const EngineParams& params) {
  if (params.k < 2) throw UsageError("the partition engine needs k >= 2");
  if (fam.size() > 64) throw CapabilityError("the partition engine keeps explicit colourings; |F| <= 64");
  const int k = params.k;
  const AntichainDecomposition mirsky = mirsky_decompose(fam);
  if (static_cast<int>(mirsky.height()) > 2 * k - 2) {
    const auto chain = longest_chain(fam);
    std::string text;
    for (std::size_t x = 0; x < static_cast<std::size_t>(2 * k - 1); ++x) {
      text += (x ? " < " : "") + set_json(fam[chain[x]], fam.ground()).dump();
    }
    throw PreconditionError("family has no (2," + std::to_string(k) + ")-colouring; it contains the " +
                            std::to_string(2 * k - 1) + "-chain " + text);
  }
  PartitionState s(fam, params);
  s.ext_ = linear_extension(fam);
  s.a_parts_ = 2 * k - 2;
  s.place_.assign(fam.size(), Placement{PartKind::A, 0});
  for (std::size_t part = 0; part < mirsky.parts.size(); ++part) {
    for (std::size_t i : mirsky.parts[part]) s.place_[i] = Placement{PartKind::A, static_cast<int>(part) + 1};
  }
  s.all_ = two_colourings(fam, k, params.colouring_limit);
  if (s.all_.empty()) throw PreconditionError("family has no (2," + std::to_string(k) + ")-colouring");
  s.retained_ = s.all_;
  s.fixed_.assign(fam.size(), -1);
  s.npr_.assign(fam.size(), std::nullopt);
  s.entered_.assign(fam.size(), 0);
  s.comparable_.assign(fam.size(), 0);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = 0; j < fam.size(); ++j) {
      if (proper_subset(fam[i], fam[j]) || proper_subset(fam[j], fam[i])) s.comparable_[i] |= std::uint64_t{1} << j;
    }
  }
  std::ostringstream head;
  head << "n=" << fam.ground() << " k=" << k << " |F|=" << fam.size() << " epsilon=" << to_string(params.epsilon)
       << " omega=" << params.omega << " regime=" << params.regime() << " colourings=" << s.all_.size();
  s.log("init", "mirsky", head.str());
  return s;
}

// --- queries ------------------------------------------------------------------

std::vector<std::size_t> PartitionState::members(PartKind kind, int index) const {
  std::vector<std::size_t> out;
  for (std::size_t i : ext_.order) {
    if (place_[i].kind == kind && place_[i].index == index) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> PartitionState::members(PartKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i : ext_.order) {
    if (place_[i].kind == kind) out.push_back(i);
  }
  return out;
}

std::size_t PartitionState::part_size(PartKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(place_.begin(), place_.end(), [&](const Placement& p) { return p.kind == kind; }));
}

bool PartitionState::related(std::size_t a, std::size_t b) const { return (comparable_[a] >> b) & 1U; }

std::size_t PartitionState::up_degree(std::size_t f, int part) const {
  std::size_t d = 0;
  for (std::size_t g = 0; g < fam_.size(); ++g) {
    if (place_[g].kind == PartKind::A && place_[g].index == part && proper_subset(fam_[f], fam_[g])) ++d;
  }
  return d;
}

std::size_t PartitionState::down_degree(std::size_t f, int part) const {
  std::size_t d = 0;
  for (std::size_t g = 0; g < fam_.size(); ++g) {
    if (place_[g].kind == PartKind::A && place_[g].index == part && proper_subset(fam_[g], fam_[f])) ++d;
  }
  return d;
}

std::vector<std::size_t> PartitionState::neighbours_in_a(std::size_t f, std::initializer_list<int> parts) const {
  std::vector<std::size_t> out;
  for (std::size_t g : ext_.order) {
    if (place_[g].kind != PartKind::A || !related(f, g)) continue;
    if (std::find(parts.begin(), parts.end(), place_[g].index) != parts.end()) out.push_back(g);
  }
  return out;
}

std::string PartitionState::describe(std::size_t member) const {
  return set_json(fam_[member], fam_.ground()).dump();
}

std::string PartitionState::part_sizes() const {
  const int k = params_.k;
  std::ostringstream out;
  std::vector<std::size_t> a(static_cast<std::size_t>(a_parts_), 0);
  for (const auto& p : place_) {
    if (p.kind == PartKind::A && p.index >= 1 && p.index <= a_parts_) ++a[static_cast<std::size_t>(p.index - 1)];
  }
  out << "A=" << join_sizes(a);
  for (PartKind kind : {PartKind::U, PartKind::D, PartKind::P}) {
    std::vector<std::size_t> v(static_cast<std::size_t>(k - 1), 0);
    for (const auto& p : place_) {
      if (p.kind == kind && p.index >= 1 && p.index <= k - 1) ++v[static_cast<std::size_t>(p.index - 1)];
    }
    out << ' ' << to_string(kind) << '=' << join_sizes(v);
  }
  out << " R=" << part_size(PartKind::R);
  return out.str();
}

// --- bookkeeping --------------------------------------------------------------

void PartitionState::log(const std::string& stage, const std::string& op, const std::string& detail) {
  trace_.push_back("stage=" + stage + " op=" + op + (detail.empty() ? "" : " " + detail) +
                   " |C|=" + std::to_string(retained_.size()) + " " + (a_parts_ > 0 ? part_sizes() : ""));
}

void PartitionState::fix(std::size_t member, int colour) {
  if (fixed_[member] >= 0 && fixed_[member] != colour) {
    throw EngineFault("member " + describe(member) + " recoloured");
  }
  fixed_[member] = colour;
}

void PartitionState::restrict_retained() {
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    if (fixed_[i] < 0) continue;
    mask |= std::uint64_t{1} << i;
    if (fixed_[i] == 1) value |= std::uint64_t{1} << i;
  }
  std::erase_if(retained_, [&](std::uint64_t c) { return (c & mask) != value; });
}

void PartitionState::move(std::size_t member, Placement to) { place_[member] = to; }

void PartitionState::to_side(std::size_t member, PartKind kind, int index, std::vector<std::size_t> npr) {
  place_[member] = Placement{kind, index};
  npr_[member] = std::move(npr);
  entered_[member] = ++clock_;
}

void PartitionState::paranoid_check(const std::string& where) const {
  if (!params_.paranoid) return;
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    if (fixed_[i] < 0) continue;
    mask |= std::uint64_t{1} << i;
    if (fixed_[i] == 1) value |= std::uint64_t{1} << i;
  }
  std::vector<std::uint64_t> expect;
  for (std::uint64_t c : all_) {
    if ((c & mask) == value) expect.push_back(c);
  }
  if (expect != retained_) throw EngineFault("conservation broken after " + where);
  for (std::size_t f = 0; f < fam_.size(); ++f) {
    if (place_[f].kind != PartKind::A) continue;
    for (std::size_t g = 0; g < fam_.size(); ++g) {
      if (place_[g].kind == PartKind::A && place_[f].index < place_[g].index && proper_subset(fam_[f], fam_[g])) {
        throw EngineFault("monotonicity broken after " + where + ": " + describe(f) + " in A_" +
                          std::to_string(place_[f].index) + " below " + describe(g) + " in A_" +
                          std::to_string(place_[g].index));
      }
    }
  }
}

// --- colouring and branching ------------------------------------------------

int PartitionState::colour_most_frequent(std::size_t member, const std::string& stage) {
  if (member >= fam_.size()) throw UsageError("member index out of range");
  std::size_t ones = 0;
  for (std::uint64_t c : retained_) ones += bit(c, member) ? 1 : 0;
  const int colour = ones > retained_.size() - ones ? 1 : 0;
  LedgerEntry e;
  e.stage = stage;
  e.op = "colour";
  e.origin = {member};
  e.before = retained_.size();
  fix(member, colour);
  restrict_retained();
  move(member, Placement{PartKind::R, 0});
  e.after = retained_.size();
  ledger_.push_back(e);
  log(stage, "colour", "set=" + describe(member) + " colour=" + std::to_string(colour));
  paranoid_check("colour");
  return colour;
}

std::size_t PartitionState::branch_steps(std::size_t from, bool up, int start, LedgerEntry& entry,
                                         bool& hit_boundary) {
  const int colour = fixed_[from];
  const double eps = params_.epsilon.convert_to<double>();
  std::size_t moved = 0;
  std::size_t cur = from;
  int part = start;
  while (true) {
    if (part < 1 || part > a_parts_) {
      hit_boundary = true;
      return moved;
    }
    std::vector<std::size_t> nbhd;
    for (std::size_t g : ext_.order) {
      if (place_[g].kind != PartKind::A || place_[g].index != part) continue;
      if (up ? proper_subset(fam_[cur], fam_[g]) : proper_subset(fam_[g], fam_[cur])) nbhd.push_back(g);
    }
    BranchStep step;
    step.part = part;
    step.neighbourhood = nbhd.size();
    step.before = retained_.size();
    if (nbhd.empty()) {
      step.vacuous = true;
      step.kept = step.before;
      step.fraction = 1.0 - std::exp2(-eps);
      step.meets_fraction = true;
      entry.steps.push_back(step);
      hit_boundary = false;
      return moved;
    }
    std::vector<std::size_t> groups(nbhd.size() + 1, 0);
    auto group_of = [&](std::uint64_t c) {
      for (std::size_t x = 0; x < nbhd.size(); ++x) {
        if (static_cast<int>(bit(c, nbhd[x])) == colour) return x + 1;
      }
      return std::size_t{0};
    };
    for (std::uint64_t c : retained_) ++groups[group_of(c)];
    std::size_t j = 0;
    for (std::size_t x = 1; x < groups.size(); ++x) {
      if (groups[x] > groups[j]) j = x;
    }
    const std::size_t implicated = (j == 0) ? nbhd.size() : j;
    for (std::size_t x = 0; x < implicated; ++x) {
      const bool same = (j != 0 && x + 1 == j);
      fix(nbhd[x], same ? colour : 1 - colour);
      move(nbhd[x], Placement{PartKind::R, 0});
    }
    restrict_retained();
    step.j = j;
    step.kept = retained_.size();
    step.fraction = (1.0 - std::exp2(-eps)) * std::exp2(-eps * static_cast<double>(j));
    step.meets_fraction =
        step.before == 0 || static_cast<double>(step.kept) / static_cast<double>(step.before) >= step.fraction;
    entry.steps.push_back(step);
    moved += implicated;
    if (j == 0) {
      hit_boundary = false;
      return moved;
    }
    cur = nbhd[j - 1];
    part += up ? -1 : 1;
  }
}

void PartitionState::close_branch(LedgerEntry& entry) {
  entry.after = retained_.size();
  entry.applicable = entry.t >= params_.omega;
  if (entry.after == 0) {
    entry.within_bound = false;
  } else {
    const Rational shrink = Rational(entry.before, entry.after) * 6;
    entry.within_bound = compare_with_pow2(shrink, params_.epsilon * static_cast<long long>(entry.t)) <= 0;
  }
  std::ostringstream detail;
  detail << "origin=";
  for (std::size_t x = 0; x < entry.origin.size(); ++x) detail << (x ? "+" : "") << describe(entry.origin[x]);
  detail << " moved=" << entry.t << " steps=";
  for (std::size_t x = 0; x < entry.steps.size(); ++x) {
    const auto& s = entry.steps[x];
    detail << (x ? "," : "") << 'A' << s.part << ':' << (s.vacuous ? std::string("vacuous") : "j" + std::to_string(s.j));
  }
  detail << " shrink=" << to_string(Rational(entry.before, entry.after == 0 ? BigCount(1) : entry.after))
         << " bound_ok=" << (entry.within_bound ? "yes" : "no") << " applicable=" << (entry.applicable ? "yes" : "no");
  log(entry.stage, entry.op, detail.str());
}

std::size_t PartitionState::branch_from(std::size_t member, Direction dir, int start, const std::string& stage) {
  if (member >= fam_.size()) throw UsageError("member index out of range");
  if (fixed_[member] < 0) throw UsageError("branching needs a coloured set; " + describe(member) + " is uncoloured");
  if (place_[member].kind == PartKind::A) move(member, Placement{PartKind::R, 0});
  LedgerEntry e;
  e.stage = stage;
  e.branch = true;
  e.origin = {member};
  e.before = retained_.size();
  bool boundary = false;
  switch (dir) {
    case Direction::Up:
      e.op = "branch-up";
      e.t = branch_steps(member, true, start, e, boundary);
      break;
    case Direction::Down:
      e.op = "branch-down";
      e.t = branch_steps(member, false, start, e, boundary);
      break;
    case Direction::UpDown:
      e.op = "branch-up-down";
      e.t = branch_steps(member, true, start, e, boundary);
      if (boundary) e.t += branch_steps(member, false, start + 1, e, boundary);
      break;
  }
  close_branch(e);
  ledger_.push_back(std::move(e));
  paranoid_check("branch");
  return ledger_.size() - 1;
}

std::size_t PartitionState::branch_pair(std::size_t lower, std::size_t upper, int i0, const std::string& stage) {
  LedgerEntry e;
  e.stage = stage;
  e.op = "branch-up-down";
  e.branch = true;
  e.origin = {lower, upper};
  e.before = retained_.size();
  bool boundary = false;
  e.t = branch_steps(upper, true, i0, e, boundary);
  if (boundary) e.t += branch_steps(lower, false, i0 + 2, e, boundary);
  close_branch(e);
  ledger_.push_back(std::move(e));
  paranoid_check("pair branch");
  return ledger_.size() - 1;
}

// --- stage helpers ----------------------------------------------------------

bool PartitionState::shift_up(int max_part) {
  std::size_t moved = 0;
  for (int i = 2; i <= max_part; ++i) {
    auto list = members(PartKind::A, i);
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
      if (up_degree(*it, i - 1) <= params_.omega) {
        move(*it, Placement{PartKind::A, i - 1});
        ++moved;
        paranoid_check("shift-up");
      }
    }
  }
  if (moved > 0) log(a_parts_ > params_.k - 1 ? "I" : "IIa", "shift-up", "moved=" + std::to_string(moved));
  return moved > 0;
}

void PartitionState::move_to_u_or_d(const std::string& stage) {
  const int k = params_.k;
  bool moved = true;
  std::size_t total = 0;
  while (moved) {
    moved = false;
    for (std::size_t f : members(PartKind::A)) {
      const int i = place_[f].index;
      if (i >= 2 && up_degree(f, i - 1) <= params_.omega) {
        to_side(f, PartKind::U, i, neighbours_in_a(f, {i, i - 1}));
        moved = true;
      } else if (i <= k - 2 && down_degree(f, i + 1) <= params_.omega) {
        to_side(f, PartKind::D, i, neighbours_in_a(f, {i, i + 1}));
        moved = true;
      } else {
        continue;
      }
      ++total;
    }
  }
  if (total > 0) log(stage, "to-U-or-D", "moved=" + std::to_string(total));
}

void PartitionState::begin_stage(const std::string& name) {
  StageSummary s;
  s.stage = name;
  s.before = retained_.size();
  s.r_added = part_size(PartKind::R);
  s.p_added = part_size(PartKind::P);
  summaries_.push_back(s);
  log(name, "begin", "");
}

void PartitionState::end_stage() {
  StageSummary& s = summaries_.back();
  s.after = retained_.size();
  s.r_added = part_size(PartKind::R) - s.r_added;
  s.p_added = part_size(PartKind::P) - s.p_added;
  // shrink <= 2^(eps r) 3^(p/2)  <=>  (before/after) / 3^(p/2) <= 2^(eps r)
  if (s.after == 0) {
    s.within_bound = false;
  } else {
    const Rational lhs = Rational(s.before, s.after) / Rational(power(std::uint64_t{3}, s.p_added / 2));
    s.within_bound = compare_with_pow2(lhs, params_.epsilon * static_cast<long long>(s.r_added)) <= 0;
  }
  ++stages_done_;
  log(s.stage, "end", "shrink_ok=" + std::string(s.within_bound ? "yes" : "no"));
}

// --- stages -------------------------------------------------------------------

void PartitionState::run_stage_I() {
  if (stages_done_ != 0) throw UsageError("stage I runs first");
  const int k = params_.k;
  begin_stage("I");
  const std::size_t cap = fam_.size() * (fam_.size() + 1) + 1;
  for (std::size_t round = 0;; ++round) {
    if (round > cap) throw EngineFault("stage I did not terminate; " + part_sizes());
    while (shift_up(a_parts_)) {
    }
    int top = 0;
    for (int i = a_parts_; i >= 1; --i) {
      if (!members(PartKind::A, i).empty()) {
        top = i;
        break;
      }
    }
    if (top < k) break;
    const std::size_t first = members(PartKind::A, top).front();
    colour_most_frequent(first, "I");
    branch_from(first, Direction::Up, top - 1, "I");
  }
  a_parts_ = k - 1;
  end_stage();
}

void PartitionState::run_stage_II() {
  if (stages_done_ != 1) throw UsageError("stage II needs stage I first");
  const int k = params_.k;
  const std::uint64_t w = params_.omega;
  begin_stage("II");
  const std::size_t cap = fam_.size() * (fam_.size() + 1);
  std::size_t restarts = 0;
  bool restart = true;
  while (restart) {
    restart = false;
    for (int i = k - 1; i >= 1 && !restart; --i) {
      for (std::size_t f : members(PartKind::A, i)) {
        if (place_[f] != Placement{PartKind::A, i}) continue;
        if (down_degree(f, i) > w) {
          const std::size_t r_before = part_size(PartKind::R);
          colour_most_frequent(f, "IIa");
          branch_from(f, Direction::UpDown, i - 1, "IIa");
          for (std::size_t g : members(PartKind::D)) {
            move(g, Placement{PartKind::A, place_[g].index});
            npr_[g].reset();
            entered_[g] = 0;
          }
          while (shift_up(k - 1)) {
          }
          if (part_size(PartKind::R) <= r_before) throw EngineFault("stage IIa restart without growth of R");
          if (++restarts > cap) throw EngineFault("stage IIa restart cap exceeded; " + part_sizes());
          log("IIa", "restart", "count=" + std::to_string(restarts));
          restart = true;
          break;
        }
        if (i == k - 1 || down_degree(f, i + 1) > w) continue;
        to_side(f, PartKind::D, i, neighbours_in_a(f, {i, i + 1}));
        log("IIa", "to-D", "set=" + describe(f));
      }
    }
  }
  move_to_u_or_d("IIb");
  end_stage();
}

void PartitionState::run_stage_III() {
  if (stages_done_ != 2) throw UsageError("stage III needs stage II first");
  const int k = params_.k;
  begin_stage("III");
  while (true) {
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    int part = 0;
    for (int i = 1; i <= k - 1 && !pair; ++i) {
      const auto list = members(PartKind::A, i);
      for (std::size_t x = 0; x < list.size() && !pair; ++x) {
        for (std::size_t y = x + 1; y < list.size(); ++y) {
          if (proper_subset(fam_[list[x]], fam_[list[y]])) {
            pair = {list[x], list[y]};
            part = i;
            break;
          }
        }
      }
    }
    if (!pair) break;
    const auto [a, b] = *pair;
    std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::uint64_t c : retained_) {
      const bool ca = bit(c, a);
      const bool cb = bit(c, b);
      if (!ca && !cb) ++n00;
      if (!ca && cb) ++n01;
      if (ca && !cb) ++n10;
      if (ca && cb) ++n11;
    }
    LedgerEntry e;
    e.stage = "III";
    e.origin = {a, b};
    e.before = retained_.size();
    if (3 * (n00 + n11) >= retained_.size()) {
      const int colour = n11 > n00 ? 1 : 0;
      e.op = "colour-pair";
      fix(a, colour);
      fix(b, colour);
      restrict_retained();
      move(a, Placement{PartKind::R, 0});
      move(b, Placement{PartKind::R, 0});
      e.after = retained_.size();
      ledger_.push_back(e);
      log("III", "colour-pair", "pair=" + describe(a) + "<" + describe(b) + " colour=" + std::to_string(colour));
      paranoid_check("colour-pair");
      branch_pair(a, b, part - 1, "III");
    } else {
      const bool low_first = n01 >= n10;  // A=0, B=1 on ties
      e.op = "pair-to-P";
      fix(a, low_first ? 0 : 1);
      fix(b, low_first ? 1 : 0);
      restrict_retained();
      to_side(a, PartKind::P, part, neighbours_in_a(a, {part}));
      to_side(b, PartKind::P, part, neighbours_in_a(b, {part}));
      e.after = retained_.size();
      ledger_.push_back(e);
      log("III", "pair-to-P", "pair=" + describe(a) + "<" + describe(b) + " pattern=" + (low_first ? "01" : "10"));
      paranoid_check("pair-to-P");
    }
    move_to_u_or_d("III");
  }
  end_stage();
}

void PartitionState::run_stage_IV() {
  if (stages_done_ != 3) throw UsageError("stage IV needs stage III first");
  const int k = params_.k;
  const std::uint64_t w = params_.omega;
  begin_stage("IV");
  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t f : members(PartKind::R)) {
      bool dense = true;
      for (int i = 1; i <= k - 1 && dense; ++i) dense = degree(f, i) > 2 * w;
      if (dense) {
        pick = f;
        break;
      }
    }
    if (!pick) break;
    const std::size_t f = *pick;
    const std::size_t a_before = part_size(PartKind::A);
    if (down_degree(f, 1) > w) {
      branch_from(f, Direction::Down, 1, "IV");
    } else if (up_degree(f, k - 1) > w) {
      branch_from(f, Direction::Up, k - 1, "IV");
    } else {
      int i0 = 0;
      for (int i = 1; i <= k - 1; ++i) {
        if (up_degree(f, i) > w) i0 = i;
      }
      branch_from(f, Direction::UpDown, i0, "IV");
    }
    move_to_u_or_d("IV");
    if (part_size(PartKind::A) >= a_before) throw EngineFault("stage IV branch removed nothing; " + part_sizes());
  }
  for (std::size_t f : members(PartKind::R)) {
    int index = 0;
    for (int i = 1; i <= k - 1; ++i) {
      if (degree(f, i) <= 2 * w) {
        index = i;
        break;
      }
    }
    if (index == 0) throw EngineFault("R set " + describe(f) + " has no sparse part");
    place_[f].index = index;
  }
  log("IV", "assign-R", "");
  end_stage();
}

void PartitionState::run_all() {
  run_stage_I();
  run_stage_II();
  run_stage_III();
  run_stage_IV();
}

// --- verification -------------------------------------------------------------

VerifyReport PartitionState::verify() const {
  const int k = params_.k;
  const std::uint64_t w = params_.omega;
  const std::size_t m = fam_.size();
  VerifyReport rep;
  auto in = [&](std::size_t f, PartKind kind, int i) { return place_[f].kind == kind && place_[f].index == i; };
  auto name_of = [&](std::size_t f) {
    return describe(f) + " in " + to_string(place_[f].kind) + "_" + std::to_string(place_[f].index);
  };
  auto check = [](std::vector<CheckResult>& list, const std::string& name) -> CheckResult& {
    list.push_back(CheckResult{name, true, ""});
    return list.back();
  };
  auto fail = [](CheckResult& c, const std::string& why) {
    if (c.pass) {
      c.pass = false;
      c.witness = why;
    }
  };
  auto cap = [](std::uint64_t a, std::size_t b) { return std::to_string(b) + " > " + std::to_string(a); };

  // Q1
  {
    CheckResult& c = check(rep.qualities, "Q1");
    for (std::size_t f = 0; f < m && c.pass; ++f) {
      for (std::size_t g = 0; g < m; ++g) {
        if (place_[f].kind == PartKind::A && place_[g].kind == PartKind::A && place_[f].index < place_[g].index &&
            proper_subset(fam_[f], fam_[g])) {
          fail(c, name_of(f) + " below " + name_of(g));
          break;
        }
      }
    }
  }
  // Q2, Q3, Q4, Q5
  {
    CheckResult& q2 = check(rep.qualities, "Q2");
    CheckResult& q3 = check(rep.qualities, "Q3");
    CheckResult& q4 = check(rep.qualities, "Q4");
    CheckResult& q5 = check(rep.qualities, "Q5");
    for (std::size_t f = 0; f < m; ++f) {
      if (place_[f].kind != PartKind::A) continue;
      const int i = place_[f].index;
      if (i < 1 || i > k - 1) {
        fail(q2, name_of(f) + " outside A_1..A_k-1");
        continue;
      }
      if (up_degree(f, i) > w) fail(q2, name_of(f) + ": up-degree " + cap(w, up_degree(f, i)));
      if (i >= 2 && up_degree(f, i - 1) <= w) fail(q3, name_of(f) + ": up-degree into A_" + std::to_string(i - 1) + " <= omega");
      if (down_degree(f, i) > w) fail(q4, name_of(f) + ": down-degree " + cap(w, down_degree(f, i)));
      if (i <= k - 2 && down_degree(f, i + 1) <= w) {
        fail(q5, name_of(f) + ": down-degree into A_" + std::to_string(i + 1) + " <= omega");
      }
    }
  }
  // Q6
  {
    CheckResult& c = check(rep.qualities, "Q6");
    for (std::size_t f = 0; f < m; ++f) {
      const int i = place_[f].index;
      if (place_[f].kind == PartKind::U) {
        if (i < 2 || i > k - 1) {
          fail(c, name_of(f) + " (U_1 must be empty)");
        } else if (std::max(degree(f, i), degree(f, i - 1)) > 2 * w) {
          fail(c, name_of(f) + ": degree into A_" + std::to_string(i) + "/A_" + std::to_string(i - 1) + " above 2omega");
        }
      }
      if (place_[f].kind == PartKind::D) {
        if (i < 1 || i > k - 2) {
          fail(c, name_of(f) + " (D_k-1 must be empty)");
        } else if (std::max(degree(f, i), degree(f, i + 1)) > 2 * w) {
          fail(c, name_of(f) + ": degree into A_" + std::to_string(i) + "/A_" + std::to_string(i + 1) + " above 2omega");
        }
      }
    }
  }
  // Q7
  {
    CheckResult& c = check(rep.qualities, "Q7");
    for (int i = 1; i <= k - 1 && c.pass; ++i) {
      const auto list = members(PartKind::A, i);
      for (std::size_t x = 0; x < list.size() && c.pass; ++x) {
        for (std::size_t y = 0; y < list.size(); ++y) {
          if (proper_subset(fam_[list[x]], fam_[list[y]])) {
            fail(c, describe(list[x]) + " < " + describe(list[y]) + " in A_" + std::to_string(i));
            break;
          }
        }
      }
    }
  }
  // Q8, Q9
  {
    CheckResult& q8 = check(rep.qualities, "Q8");
    CheckResult& q9 = check(rep.qualities, "Q9");
    for (std::size_t f = 0; f < m; ++f) {
      const int i = place_[f].index;
      if (place_[f].kind == PartKind::P && degree(f, i) > 2 * w) fail(q8, name_of(f) + ": degree " + cap(2 * w, degree(f, i)));
      if (place_[f].kind == PartKind::R) {
        if (i < 1 || i > k - 1) {
          fail(q9, describe(f) + " in R has no part index");
        } else if (degree(f, i) > 2 * w) {
          fail(q9, name_of(f) + ": degree " + cap(2 * w, degree(f, i)));
        }
      }
    }
  }

  // P1
  {
    CheckResult& c = check(rep.properties, "P1");
    rep.colourings = count(fam_, 2, k).count;
    const std::size_t plain = part_size(PartKind::A) + part_size(PartKind::U) + part_size(PartKind::D);
    const std::size_t p_size = part_size(PartKind::P);
    rep.p1_pairs = p_size / 2;
    rep.p1_exponent = Rational(static_cast<long long>(plain)) + params_.epsilon * static_cast<long long>(part_size(PartKind::R));
    if (p_size % 2 != 0) {
      fail(c, "|P| = " + std::to_string(p_size) + " is odd");
    } else if (rep.colourings > 0) {
      const Rational lhs = Rational(rep.colourings) / Rational(power(std::uint64_t{3}, rep.p1_pairs));
      if (compare_with_pow2(lhs, rep.p1_exponent) > 0) {
        fail(c, "count " + to_decimal(rep.colourings) + " exceeds 2^(" + to_string(rep.p1_exponent) + ") * 3^" +
                    std::to_string(rep.p1_pairs));
      }
    }
    if (BigCount(all_.size()) != rep.colourings) {
      fail(c, "explicit colouring list has " + std::to_string(all_.size()) + " entries, counter gives " +
                  to_decimal(rep.colourings));
    }
  }
  // P2
  {
    CheckResult& c = check(rep.properties, "P2");
    const CheckResult* q7 = rep.find("Q7");
    if (!q7->pass) fail(c, q7->witness);
  }
  // P3
  {
    CheckResult& c = check(rep.properties, "P3");
    if (!members(PartKind::U, 1).empty()) fail(c, "U_1 is not empty");
    if (!members(PartKind::D, k - 1).empty()) fail(c, "D_" + std::to_string(k - 1) + " is not empty");
    for (int i = 1; i <= k - 1; ++i) {
      for (std::size_t f = 0; f < m; ++f) {
        const bool listed = in(f, PartKind::U, i) || in(f, PartKind::U, i + 1) || in(f, PartKind::D, i) ||
                            in(f, PartKind::D, i - 1) || in(f, PartKind::P, i) || in(f, PartKind::R, i);
        if (listed && degree(f, i) > 2 * w) {
          fail(c, name_of(f) + ": comparable to " + std::to_string(degree(f, i)) + " sets of A_" + std::to_string(i));
        }
      }
    }
  }
  // P4 and the prospective-neighbourhood checks
  CheckResult npr_size{"Npr-size", true, ""};
  CheckResult npr_left{"Npr-left", true, ""};
  {
    CheckResult& c = check(rep.properties, "P4");
    for (int i = 1; i <= k - 1; ++i) {
      const std::vector<std::vector<std::pair<PartKind, int>>> choices = {
          {{PartKind::U, i}, {PartKind::D, i}, {PartKind::P, i}},
          {{PartKind::U, i}, {PartKind::D, i - 1}},
          {{PartKind::D, i}, {PartKind::U, i + 1}}};
      for (std::size_t ch = 0; ch < choices.size(); ++ch) {
        std::vector<std::size_t> b_part;
        for (std::size_t f = 0; f < m; ++f) {
          for (const auto& [kind, idx] : choices[ch]) {
            if (in(f, kind, idx)) b_part.push_back(f);
          }
        }
        std::vector<std::size_t> a_part = members(PartKind::A, i);
        std::vector<std::size_t> both = a_part;
        both.insert(both.end(), b_part.begin(), b_part.end());
        std::uint64_t pairs = 0;
        for (std::size_t x : both) {
          for (std::size_t y : both) pairs += proper_subset(fam_[x], fam_[y]) ? 1 : 0;
        }
        const unsigned __int128 bound = static_cast<unsigned __int128>(3) * w * b_part.size();
        if (pairs > bound) {
          fail(c, "A_" + std::to_string(i) + " with B choice " + std::to_string(ch + 1) + ": " + std::to_string(pairs) +
                      " comparable pairs > 3omega*" + std::to_string(b_part.size()));
        }
        for (std::size_t f : b_part) {
          if (!npr_[f]) {
            fail(npr_left, describe(f) + " has no prospective neighbourhood");
            continue;
          }
          const auto& np = *npr_[f];
          std::vector<std::size_t> left;
          for (std::size_t g : a_part) {
            if (related(f, g)) left.push_back(g);
          }
          for (std::size_t g : b_part) {
            if (g != f && entered_[g] > entered_[f] && related(f, g)) left.push_back(g);
          }
          for (std::size_t g : left) {
            if (std::find(np.begin(), np.end(), g) == np.end()) {
              fail(npr_left, "left neighbour " + describe(g) + " of " + name_of(f) + " missing from its prospective neighbourhood");
            }
          }
        }
      }
    }
    for (std::size_t f = 0; f < m; ++f) {
      if (npr_[f] && npr_[f]->size() > 3 * w) {
        fail(npr_size, name_of(f) + ": |Npr| = " + std::to_string(npr_[f]->size()) + " > 3omega");
      }
    }
  }
  // P5
  {
    CheckResult& c = check(rep.properties, "P5");
    const int h = height(fam_);
    if (h > 2 * k - 2) fail(c, "height " + std::to_string(h) + " > 2k-2");
  }

  rep.extras.push_back(npr_size);
  rep.extras.push_back(npr_left);
  {
    CheckResult c{"branch-shrink", true, ""};
    for (std::size_t x = 0; x < ledger_.size(); ++x) {
      const auto& e = ledger_[x];
      if (e.branch && e.applicable && !e.within_bound) {
        fail(c, "ledger entry " + std::to_string(x) + " (" + e.stage + " " + e.op + "): t=" + std::to_string(e.t) +
                    " shrink " + e.before.str() + "/" + e.after.str() + " > (1/6) 2^(eps t)");
      }
    }
    rep.extras.push_back(c);
  }
  {
    CheckResult c{"conservation", true, ""};
    std::uint64_t mask = 0;
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < fixed_.size(); ++i) {
      if (fixed_[i] < 0) continue;
      mask |= std::uint64_t{1} << i;
      if (fixed_[i] == 1) value |= std::uint64_t{1} << i;
    }
    std::size_t expect = 0;
    for (std::uint64_t col : all_) expect += ((col & mask) == value) ? 1 : 0;
    if (expect != retained_.size()) fail(c, "retained " + std::to_string(retained_.size()) + " != " + std::to_string(expect));
    for (std::size_t f = 0; f < m; ++f) {
      const bool coloured_part = place_[f].kind == PartKind::R || place_[f].kind == PartKind::P;
      if (coloured_part != (fixed_[f] >= 0)) fail(c, name_of(f) + " colour state does not match its part");
    }
    rep.extras.push_back(c);
  }
  return rep;
}

// --- serialisation ------------------------------------------------------------

nlohmann::json PartitionState::to_json(const VerifyReport* report) const {
  const int n = fam_.ground();
  const int k = params_.k;
  using nlohmann::json;
  auto part_json = [&](PartKind kind, int index) {
    SetFamily sub(n);
    for (std::size_t f : members(kind, index)) sub.add(fam_[f]);
    return sorted_sets_json(sub);
  };
  json parts = json::object();
  for (PartKind kind : {PartKind::A, PartKind::U, PartKind::D, PartKind::P, PartKind::R}) {
    json list = json::array();
    const int hi = (kind == PartKind::A) ? a_parts_ : k - 1;
    for (int i = 1; i <= hi; ++i) list.push_back(part_json(kind, i));
    parts[to_string(kind)] = list;
  }
  if (!members(PartKind::R, 0).empty()) parts["R_unassigned"] = part_json(PartKind::R, 0);

  json fixed = json::array();
  for (std::size_t f : ext_.order) {
    if (fixed_[f] >= 0) fixed.push_back(json{{"set", set_json(fam_[f], n)}, {"colour", fixed_[f]}});
  }
  json ledger = json::array();
  for (const auto& e : ledger_) {
    json origin = json::array();
    for (std::size_t f : e.origin) origin.push_back(set_json(fam_[f], n));
    json steps = json::array();
    for (const auto& s : e.steps) {
      steps.push_back(json{{"part", s.part},
                           {"neighbourhood", s.neighbourhood},
                           {"case", s.vacuous ? "vacuous" : (s.j == 0 ? "i" : "ii")},
                           {"j", s.j},
                           {"before", s.before},
                           {"kept", s.kept},
                           {"meets_fraction", s.meets_fraction}});
    }
    json row{{"stage", e.stage},   {"op", e.op},     {"origin", origin},
             {"t", e.t},           {"before", e.before.str()}, {"after", e.after.str()},
             {"shrink", rational_json(Rational(e.before, e.after == 0 ? BigCount(1) : e.after))}};
    if (e.branch) {
      row["applicable"] = e.applicable;
      row["within_bound"] = e.within_bound;
      row["steps"] = steps;
    }
    ledger.push_back(row);
  }
  json stages = json::array();
  for (const auto& s : summaries_) {
    stages.push_back(json{{"stage", s.stage},
                          {"before", s.before.str()},
                          {"after", s.after.str()},
                          {"r_added", s.r_added},
                          {"p_added", s.p_added},
                          {"within_bound", s.within_bound}});
  }
  json out{{"n", n},
           {"k", k},
           {"family", family_json(fam_)},
           {"params",
            {{"epsilon", rational_json(params_.epsilon)}, {"omega", std::to_string(params_.omega)}, {"regime", params_.regime()}}},
           {"stages_done", stages_done_},
           {"parts", parts},
           {"sizes",
            {{"A", part_size(PartKind::A)},
             {"U", part_size(PartKind::U)},
             {"D", part_size(PartKind::D)},
             {"P", part_size(PartKind::P)},
             {"R", part_size(PartKind::R)}}},
           {"colourings", std::to_string(all_.size())},
           {"retained", std::to_string(retained_.size())},
           {"fixed", fixed},
           {"ledger", ledger},
           {"stages", stages}};
  if (report != nullptr) {
    auto list_json = [](const std::vector<CheckResult>& list) {
      json o = json::object();
      for (const auto& c : list) {
        o[c.name] = c.pass;
        if (!c.pass) o[c.name + "_witness"] = c.witness;
      }
      return o;
    };
    out["qualities"] = list_json(report->qualities);
    out["properties"] = list_json(report->properties);
    out["checks"] = list_json(report->extras);
    out["p1"] = json{{"count", report->colourings.str()},
                     {"exponent", rational_json(report->p1_exponent)},
                     {"pairs", report->p1_pairs}};
    out["all_pass"] = report->qualities_pass() && report->properties_pass();
  }
  return out;
}

}  // namespace erl
