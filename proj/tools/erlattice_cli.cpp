// erlattice command-line front end. Talks to the core only through the C API.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "erlattice/erlattice.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapability = 3;
constexpr int kExitVerify = 4;

struct Failure {
  int code;
  std::string message;
};

int exit_code(erl_status s) {
  switch (s) {
    case ERL_OK: return kExitOk;
    case ERL_ERR_USAGE:
    case ERL_ERR_PRECONDITION: return kExitUsage;
    case ERL_ERR_CAPABILITY: return kExitCapability;
    case ERL_ERR_VERIFY: return kExitVerify;
    default: return kExitInternal;
  }
}

void check(erl_status s) {
  if (s != ERL_OK) throw Failure{exit_code(s), erl_last_error()};
}

struct StringOut {
  char* p = nullptr;
  ~StringOut() { erl_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
  json parse() const { return json::parse(p); }
};

struct FamilyHandle {
  erl_family* p = nullptr;
  ~FamilyHandle() { erl_family_free(p); }
};

struct PartitionHandle {
  erl_partition* p = nullptr;
  ~PartitionHandle() { erl_partition_free(p); }
};

struct Options {
  int n = 0;
  std::string family;
  bool mirror = false;
  int r = 0;
  int k = 0;
  std::string method = "auto";
  std::string epsilon;
  long long omega = -1;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  int threads = 1;
  bool csv = false;
  bool json_out = false;
  std::string colouring;
  std::string delta;
  bool verify = false;
  bool trace = false;
  bool paranoid = false;
  int stage = 4;
  bool exhaustive = false;
  int restarts = 1;
  std::string kind;
  int j = 1;
  std::string out_dir;
  std::vector<int> criteria;
};

void load_family(const Options& o, FamilyHandle& fam) {
  if (o.family.empty()) throw Failure{kExitUsage, "--family is required"};
  check(erl_family_parse(o.family.c_str(), o.n, o.mirror ? 1 : 0, &fam.p));
}

std::vector<int> parse_colouring(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Failure{kExitUsage, "bad colour '" + item + "' in --colouring"};
    }
  }
  return out;
}

// Flat CSV: one header row and one value row of the scalar payload fields.
std::string flat_csv(const json& payload) {
  std::string head;
  std::string row;
  for (const auto& [key, value] : payload.items()) {
    if (value.is_structured()) continue;
    head += (head.empty() ? "" : ",") + key;
    row += (row.empty() ? "" : ",") + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return head + "\n" + row + "\n";
}

struct Outcome {
  json payload;
  int code = kExitOk;
  std::string csv;  // preformatted CSV, if the operation has its own
};

Outcome run_count(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  StringOut out;
  check(erl_count(fam.p, o.r, o.k, o.method.c_str(), o.budget, o.threads, &out.p));
  return {out.parse()};
}

Outcome run_validate(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  const std::vector<int> colours = parse_colouring(o.colouring);
  int valid = 0;
  StringOut out;
  check(erl_validate(fam.p, o.r, o.k, colours.data(), colours.size(), &valid, &out.p));
  return {out.parse(), valid ? kExitOk : kExitVerify};
}

Outcome run_cp(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  StringOut out;
  check(erl_comparable_pairs(fam.p, &out.p));
  return {out.parse()};
}

Outcome run_kleitman(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  int holds = 0;
  StringOut out;
  check(erl_kleitman(fam.p, &holds, &out.p));
  return {out.parse(), holds ? kExitOk : kExitVerify};
}

Outcome run_lym(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  int holds = 0;
  StringOut out;
  check(erl_lym(fam.p, &holds, &out.p));
  return {out.parse(), holds ? kExitOk : kExitVerify};
}

Outcome run_weight(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  int holds = 0;
  StringOut out;
  check(erl_weight(fam.p, o.k, o.delta.empty() ? nullptr : o.delta.c_str(), &holds, &out.p));
  return {out.parse(), holds ? kExitOk : kExitVerify};
}

Outcome run_mirsky(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  StringOut out;
  check(erl_mirsky(fam.p, &out.p));
  return {out.parse()};
}

Outcome run_partition(const Options& o) {
  FamilyHandle fam;
  load_family(o, fam);
  if (o.stage < 0 || o.stage > 4) throw Failure{kExitUsage, "--stage must lie in [0, 4]"};
  PartitionHandle part;
  check(erl_partition_init(fam.p, o.k, o.epsilon.empty() ? nullptr : o.epsilon.c_str(), o.omega, o.paranoid ? 1 : 0,
                           &part.p));
  for (int s = 1; s <= o.stage; ++s) check(erl_partition_run_stage(part.p, s));
  Outcome res;
  StringOut out;
  if (o.verify) {
    int pass = 0;
    check(erl_partition_verify(part.p, &pass, &out.p));
    res.code = pass ? kExitOk : kExitVerify;
  } else {
    check(erl_partition_to_json(part.p, &out.p));
  }
  res.payload = out.parse();
  if (o.trace) {
    StringOut trace;
    check(erl_partition_trace(part.p, &trace.p));
    json lines = json::array();
    std::stringstream in(trace.str());
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    res.payload["trace"] = lines;
  }
  return res;
}

Outcome run_search(const Options& o) {
  StringOut out;
  check(erl_search(o.n, o.r, o.k, o.exhaustive ? 1 : 0, o.budget, o.seed, o.restarts, o.threads, 0, &out.p));
  Outcome res{out.parse()};
  if (o.csv) {
    StringOut csv;
    check(erl_search(o.n, o.r, o.k, o.exhaustive ? 1 : 0, o.budget, o.seed, o.restarts, o.threads, 1, &csv.p));
    res.csv = csv.str();
  }
  if (!res.payload.value("verified", true)) res.code = kExitVerify;
  return res;
}

Outcome run_construct(const Options& o) {
  if (o.kind.empty()) throw Failure{kExitUsage, "--kind is required (middle, paired, assignment)"};
  StringOut out;
  check(erl_construct(o.kind.c_str(), o.n, o.r, o.k, o.j, o.mirror ? 1 : 0, &out.p));
  Outcome res{out.parse()};
  if (res.payload.contains("invariants_hold") && !res.payload["invariants_hold"].get<bool>()) res.code = kExitVerify;
  return res;
}

Outcome run_report(const Options& o) {
  if (o.out_dir.empty()) throw Failure{kExitUsage, "--out is required"};
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw Failure{kExitUsage, "cannot create '" + o.out_dir + "': " + ec.message()};
  std::vector<int> ids = o.criteria;
  if (ids.empty()) {
    for (int id = 1; id <= erl_acceptance_count(); ++id) ids.push_back(id);
  }
  json index = json::array();
  bool all = true;
  for (int id : ids) {
    int pass = 0;
    StringOut out;
    check(erl_acceptance_run(id, 0, &pass, &out.p));
    const std::string name = "criterion_" + std::to_string(id) + ".json";
    std::ofstream file(fs::path(o.out_dir) / name);
    file << out.parse().dump(2) << "\n";
    if (!file) throw Failure{kExitUsage, "cannot write " + name};
    all = all && pass;
    index.push_back(json{{"criterion", id}, {"pass", pass != 0}, {"file", name}});
  }
  json payload{{"criteria", index}, {"all_pass", all}};
  std::ofstream idx(fs::path(o.out_dir) / "index.json");
  idx << payload.dump(2) << "\n";
  return {payload, all ? kExitOk : kExitVerify};
}

json parameters_of(const CLI::App* sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto& res = opt->results();
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (opt->get_type_size() == 0) {
      params[name] = true;
    } else if (res.size() == 1) {
      params[name] = res.front();
    } else {
      params[name] = res;
    }
  }
  return params;
}

void add_family_flags(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "ground set size");
  sub->add_option("--family", o.family, "all | level:j | middle:j | random:p,seed | file:PATH")->required();
  sub->add_flag("--mirror", o.mirror, "upper block for middle:j when n-j is odd");
}

void add_format_flags(CLI::App* sub, Options& o) {
  auto* j = sub->add_flag("--json", o.json_out, "JSON output (default)");
  auto* c = sub->add_flag("--csv", o.csv, "CSV output");
  j->excludes(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Erdos-Rothschild colourings of Boolean lattice families"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(erl_version()));
  Options o;

  auto* count = app.add_subcommand("count", "number of (r,k)-colourings");
  add_family_flags(count, o);
  count->add_option("--r", o.r, "colours")->required();
  count->add_option("--k", o.k, "forbidden chain length")->required();
  count->add_option("--method", o.method, "auto | bruteforce | backtrack | layered");
  count->add_option("--budget", o.budget, "enumeration budget (0: default)");
  count->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "check one colouring");
  add_family_flags(validate, o);
  validate->add_option("--r", o.r, "colours")->required();
  validate->add_option("--k", o.k, "forbidden chain length")->required();
  validate->add_option("--colouring", o.colouring, "comma-separated colours in member order, 0-based")->required();

  auto* cp = app.add_subcommand("cp", "comparable pairs");
  add_family_flags(cp, o);

  auto* kleitman = app.add_subcommand("kleitman", "comparable pairs against the Kleitman bound");
  add_family_flags(kleitman, o);

  auto* lym = app.add_subcommand("lym", "LYM-type sum");
  add_family_flags(lym, o);

  auto* weight = app.add_subcommand("weight", "w_k weight and optional supersaturation check");
  add_family_flags(weight, o);
  weight->add_option("--k", o.k, "chain length")->required();
  weight->add_option("--delta", o.delta, "NUM/DEN in (0, 1/2)");

  auto* mirsky = app.add_subcommand("mirsky", "height and antichain decomposition");
  add_family_flags(mirsky, o);

  auto* partition = app.add_subcommand("partition", "run the partition engine");
  add_family_flags(partition, o);
  partition->add_option("--k", o.k, "chain length")->required();
  partition->add_option("--epsilon", o.epsilon, "NUM/DEN");
  partition->add_option("--omega", o.omega, "degree threshold")->check(CLI::NonNegativeNumber);
  partition->add_option("--stage", o.stage, "run stages 1..N (0: initial state)");
  partition->add_flag("--verify", o.verify, "check Q1-Q9 and P1-P5");
  partition->add_flag("--trace", o.trace, "include the operation trace");
  partition->add_flag("--paranoid", o.paranoid, "recheck invariants after every operation");

  auto* search = app.add_subcommand("search", "maximise the colouring count");
  search->add_option("--n", o.n, "ground set size")->required();
  search->add_option("--r", o.r, "colours")->required();
  search->add_option("--k", o.k, "forbidden chain length")->required();
  search->add_flag("--exhaustive", o.exhaustive, "all isomorphism classes (n <= 4)");
  search->add_option("--budget", o.budget, "count evaluations for local search");
  search->add_option("--seed", o.seed, "seed for local search");
  search->add_option("--restarts", o.restarts, "local search restarts")->check(CLI::PositiveNumber);
  search->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* construct = app.add_subcommand("construct", "extremal constructions");
  construct->add_option("--kind", o.kind, "middle | paired | assignment")->required();
  construct->add_option("--n", o.n, "ground set size");
  construct->add_option("--j", o.j, "number of middle levels");
  construct->add_option("--r", o.r, "colours");
  construct->add_option("--k", o.k, "chain length");
  construct->add_flag("--mirror", o.mirror, "upper block on ties");

  auto* report = app.add_subcommand("report", "run the acceptance sweep into a directory");
  report->add_option("--out", o.out_dir, "artifact directory")->required();
  report->add_option("--criterion", o.criteria, "criteria to run (default: all)");

  for (auto* sub : {count, validate, cp, kleitman, lym, weight, mirsky, partition, search, construct, report}) {
    add_format_flags(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const auto start = std::chrono::steady_clock::now();
  Outcome res;
  try {
    const std::string name = sub->get_name();
    if (name == "count") res = run_count(o);
    else if (name == "validate") res = run_validate(o);
    else if (name == "cp") res = run_cp(o);
    else if (name == "kleitman") res = run_kleitman(o);
    else if (name == "lym") res = run_lym(o);
    else if (name == "weight") res = run_weight(o);
    else if (name == "mirsky") res = run_mirsky(o);
    else if (name == "partition") res = run_partition(o);
    else if (name == "search") res = run_search(o);
    else if (name == "construct") res = run_construct(o);
    else res = run_report(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (o.csv) {
    std::cout << (res.csv.empty() ? flat_csv(res.payload) : res.csv);
  } else {
    json result{{"command", sub->get_name()},
                {"parameters", parameters_of(sub)},
                {"payload", res.payload},
                {"wall_time_ms", ms},
                {"version", erl_version()}};
    std::cout << result.dump(2) << "\n";
  }
  if (res.code == kExitVerify) std::cerr << "verification failed; details in the payload\n";
  return res.code;
}
