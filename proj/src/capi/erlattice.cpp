#include "erlattice/erlattice.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "erlattice/acceptance.hpp"
#include "erlattice/coloring.hpp"
#include "erlattice/constructions.hpp"
#include "erlattice/errors.hpp"
#include "erlattice/partition.hpp"
#include "erlattice/serialize.hpp"
#include "erlattice/supersat.hpp"

struct erl_family {
  erl::SetFamily fam;
};

struct erl_partition {
  erl::PartitionState state;
};

namespace {

thread_local std::string last_error;

template <class F>
erl_status guard(F&& body) {
  try {
    last_error.clear();
    body();
    return ERL_OK;
  } catch (const erl::UsageError& e) {
    last_error = e.what();
    return ERL_ERR_USAGE;
  } catch (const erl::CapabilityError& e) {
    last_error = e.what();
    return ERL_ERR_CAPABILITY;
  } catch (const erl::PreconditionError& e) {
    last_error = e.what();
    return ERL_ERR_PRECONDITION;
  } catch (const erl::EngineFault& e) {
    last_error = std::string("engine fault: ") + e.what();
    return ERL_ERR_INTERNAL;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return ERL_ERR_USAGE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ERL_ERR_CAPABILITY;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ERL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return ERL_ERR_INTERNAL;
  }
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const nlohmann::json& j) {
  if (out == nullptr) throw erl::UsageError("output pointer is null");
  *out = copy_out(j.dump());
}

const erl::SetFamily& need(const erl_family* fam) {
  if (fam == nullptr) throw erl::UsageError("family handle is null");
  return fam->fam;
}

erl::PartitionState& need(erl_partition* p) {
  if (p == nullptr) throw erl::UsageError("partition handle is null");
  return p->state;
}

const erl::PartitionState& need(const erl_partition* p) {
  if (p == nullptr) throw erl::UsageError("partition handle is null");
  return p->state;
}

nlohmann::json chain_json(const erl::SetFamily& fam, const std::vector<std::size_t>& chain) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i : chain) out.push_back(erl::set_json(fam[i], fam.ground()));
  return out;
}

}  // namespace

extern "C" {

const char* erl_version(void) { return "0.1.0"; }

const char* erl_last_error(void) { return last_error.c_str(); }

void erl_string_free(char* s) { std::free(s); }

// --- families -----------------------------------------------------------------

erl_status erl_family_parse(const char* specifier, int n, int mirror, erl_family** out) {
  return guard([&] {
    if (specifier == nullptr || out == nullptr) throw erl::UsageError("null argument");
    *out = new erl_family{erl::parse_family_spec(specifier, n, mirror != 0)};
  });
}

erl_status erl_family_from_json(const char* text, erl_family** out) {
  return guard([&] {
    if (text == nullptr || out == nullptr) throw erl::UsageError("null argument");
    *out = new erl_family{erl::family_from_json(nlohmann::json::parse(text))};
  });
}

void erl_family_free(erl_family* fam) { delete fam; }

erl_status erl_family_size(const erl_family* fam, size_t* size) {
  return guard([&] {
    if (size == nullptr) throw erl::UsageError("null argument");
    *size = need(fam).size();
  });
}

erl_status erl_family_ground(const erl_family* fam, int* n) {
  return guard([&] {
    if (n == nullptr) throw erl::UsageError("null argument");
    *n = need(fam).ground();
  });
}

erl_status erl_family_to_json(const erl_family* fam, char** out) {
  return guard([&] { emit(out, erl::family_json(need(fam))); });
}

// --- counting -----------------------------------------------------------------

erl_status erl_count(const erl_family* fam, int r, int k, const char* method, uint64_t budget, int threads,
                     char** out) {
  return guard([&] {
    erl::CountOptions opts;
    opts.method = erl::parse_count_method(method == nullptr ? "auto" : method);
    if (threads < 1) throw erl::UsageError("threads must be at least 1");
    opts.threads = threads;
    if (budget != 0) {
      opts.bruteforce_budget = budget;
      opts.node_budget = budget;
    }
    const erl::SetFamily& f = need(fam);
    nlohmann::json j;
    if (opts.method == erl::CountMethod::Bruteforce) {
      j = {{"count", erl::count_json(erl::count_bruteforce(f, r, k, opts.bruteforce_budget))}, {"method", "bruteforce"}};
    } else {
      const erl::CountResult res = erl::count(f, r, k, opts);
      j = {{"count", erl::count_json(res.count)}, {"method", res.method}};
    }
    emit(out, j);
  });
}

erl_status erl_validate(const erl_family* fam, int r, int k, const int* colours, size_t len, int* valid, char** out) {
  return guard([&] {
    if (valid == nullptr || (colours == nullptr && len > 0)) throw erl::UsageError("null argument");
    if (r < 1 || r > erl::kMaxColours) throw erl::UsageError("r must lie in [1, 64]");
    const erl::SetFamily& f = need(fam);
    erl::Coloring c{r, std::vector<int>(colours, colours + len)};
    const auto chain = erl::monochromatic_chain(f, c, k);
    *valid = chain.empty() ? 1 : 0;
    emit(out, nlohmann::json{{"valid", chain.empty()}, {"chain", chain_json(f, chain)}});
  });
}

// --- structure and inequalities -------------------------------------------------

erl_status erl_comparable_pairs(const erl_family* fam, char** out) {
  return guard([&] {
    const erl::SetFamily& f = need(fam);
    emit(out, nlohmann::json{{"size", f.size()},
                             {"pairs", erl::comparable_pairs(f)},
                             {"pairs_by_degrees", erl::comparable_pairs_by_degrees(f)}});
  });
}

erl_status erl_kleitman(const erl_family* fam, int* holds, char** out) {
  return guard([&] {
    if (holds == nullptr) throw erl::UsageError("null argument");
    const erl::SetFamily& f = need(fam);
    const std::uint64_t cp = erl::comparable_pairs(f);
    const erl::BigCount required = erl::kleitman_required(f.ground(), f.size());
    const bool ok = erl::BigCount(cp) >= required;
    *holds = ok ? 1 : 0;
    emit(out, nlohmann::json{{"size", f.size()},
                             {"middle", erl::count_json(erl::binomial(f.ground(), f.ground() / 2))},
                             {"pairs", cp},
                             {"required", erl::count_json(required)},
                             {"holds", ok}});
  });
}

erl_status erl_lym(const erl_family* fam, int* holds, char** out) {
  return guard([&] {
    if (holds == nullptr) throw erl::UsageError("null argument");
    const erl::Rational s = erl::lym_sum(need(fam));
    *holds = s <= 1 ? 1 : 0;
    emit(out, nlohmann::json{{"sum", erl::rational_json(s)}, {"holds", s <= 1}});
  });
}

erl_status erl_weight(const erl_family* fam, int k, const char* delta, int* holds, char** out) {
  return guard([&] {
    if (holds == nullptr) throw erl::UsageError("null argument");
    const erl::SetFamily& f = need(fam);
    const erl::WeightReport w = erl::family_weight_report(f, k);
    bool ok = !w.bounds_checked || w.bounds_hold;
    nlohmann::json j{{"weight", erl::rational_json(w.total)},
                     {"bounds_checked", w.bounds_checked},
                     {"bounds_hold", w.bounds_hold},
                     {"witness", w.witness ? erl::set_json(*w.witness, f.ground()) : nlohmann::json(nullptr)}};
    if (delta != nullptr) {
      const erl::SupersatReport s = erl::supersat_check(f, k, erl::parse_rational(delta));
      if (s.hypothesis_plausible && !s.holds) ok = false;
      j["supersat"] = {{"r", erl::rational_json(s.r)},
                       {"observed", s.observed},
                       {"required", erl::rational_json(s.required)},
                       {"holds", s.holds},
                       {"hypothesis_plausible", s.hypothesis_plausible},
                       {"delta", erl::rational_json(s.delta)}};
    }
    *holds = ok ? 1 : 0;
    emit(out, j);
  });
}

erl_status erl_mirsky(const erl_family* fam, char** out) {
  return guard([&] {
    const erl::SetFamily& f = need(fam);
    const erl::AntichainDecomposition d = erl::mirsky_decompose(f);
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& part : d.parts) {
      erl::SetFamily sub(f.ground());
      for (std::size_t i : part) sub.add(f[i]);
      parts.push_back(erl::sorted_sets_json(sub));
    }
    emit(out, nlohmann::json{{"height", d.height()}, {"parts", parts}, {"chain", chain_json(f, erl::longest_chain(f))}});
  });
}

// --- partition engine -------------------------------------------------------------

erl_status erl_partition_init(const erl_family* fam, int k, const char* epsilon, int64_t omega, int paranoid,
                              erl_partition** out) {
  return guard([&] {
    if (out == nullptr) throw erl::UsageError("null argument");
    erl::EngineParams params = erl::EngineParams::defaults(k);
    if (epsilon != nullptr) params.set_epsilon(erl::parse_rational(epsilon));
    if (omega >= 0) params.set_omega(static_cast<std::uint64_t>(omega));
    params.paranoid = paranoid != 0;
    *out = new erl_partition{erl::PartitionState::initialize(need(fam), params)};
  });
}

void erl_partition_free(erl_partition* p) { delete p; }

erl_status erl_partition_run_stage(erl_partition* p, int stage) {
  return guard([&] {
    erl::PartitionState& s = need(p);
    switch (stage) {
      case 1: s.run_stage_I(); break;
      case 2: s.run_stage_II(); break;
      case 3: s.run_stage_III(); break;
      case 4: s.run_stage_IV(); break;
      default: throw erl::UsageError("stage must lie in [1, 4]");
    }
  });
}

erl_status erl_partition_run_all(erl_partition* p) {
  return guard([&] { need(p).run_all(); });
}

erl_status erl_partition_verify(const erl_partition* p, int* all_pass, char** out) {
  return guard([&] {
    if (all_pass == nullptr) throw erl::UsageError("null argument");
    const erl::PartitionState& s = need(p);
    const erl::VerifyReport v = s.verify();
    *all_pass = (v.qualities_pass() && v.properties_pass()) ? 1 : 0;
    emit(out, s.to_json(&v));
  });
}

erl_status erl_partition_to_json(const erl_partition* p, char** out) {
  return guard([&] { emit(out, need(p).to_json()); });
}

erl_status erl_partition_trace(const erl_partition* p, char** out) {
  return guard([&] {
    if (out == nullptr) throw erl::UsageError("null argument");
    std::string text;
    for (const auto& line : need(p).trace()) text += line + "\n";
    *out = copy_out(text);
  });
}

// --- constructions and search ----------------------------------------------------

erl_status erl_search(int n, int r, int k, int exhaustive, uint64_t budget, uint64_t seed, int restarts, int threads,
                      int csv, char** out) {
  return guard([&] {
    if (out == nullptr) throw erl::UsageError("null argument");
    if (threads < 1) throw erl::UsageError("threads must be at least 1");
    erl::SearchReport rep;
    if (exhaustive != 0) {
      rep = erl::exhaustive_search(n, r, k, threads);
    } else {
      erl::LocalSearchOptions opts;
      if (budget != 0) opts.budget = budget;
      opts.seed = seed;
      opts.restarts = restarts;
      rep = erl::local_search(n, r, k, opts);
    }
    *out = copy_out(csv != 0 ? erl::search_report_csv(rep) : erl::search_report_json(rep).dump());
  });
}

erl_status erl_construct(const char* kind, int n, int r, int k, int j, int mirror, char** out) {
  return guard([&] {
    if (kind == nullptr) throw erl::UsageError("null argument");
    const std::string what = kind;
    nlohmann::json res;
    if (what == "middle") {
      const erl::SetFamily fam = erl::middle_levels(n, j, mirror != 0);
      const auto [lo, hi] = erl::middle_level_range(n, j);
      res = {{"kind", "middle"}, {"size", fam.size()}, {"family", erl::family_json(fam)}};
      res["levels"] = mirror != 0 ? nlohmann::json{n - hi, n - lo} : nlohmann::json{lo, hi};
    } else if (what == "paired") {
      const erl::PairedConstruction pc = erl::paired_four_colouring_family(n);
      res = {{"kind", "paired"},
             {"family", erl::family_json(pc.family)},
             {"lower", pc.lower},
             {"upper", pc.upper},
             {"generated", erl::count_json(erl::paired_generated_count(pc))},
             {"distinct", erl::count_json(erl::paired_distinct_count(pc))},
             {"antichain", erl::count_json(erl::power(std::uint64_t{4}, std::max(pc.lower, pc.upper)))}};
      res["count"] = pc.family.size() <= 20 ? erl::count_json(erl::count(pc.family, 4, 2).count) : nlohmann::json(nullptr);
    } else if (what == "assignment") {
      const erl::LevelAssignment a = erl::level_assignment(r, k);
      const std::string problem = erl::check_level_assignment(a);
      res = {{"kind", "assignment"},
             {"r", r},
             {"k", k},
             {"levels", a.levels()},
             {"level_colours", a.level_colours},
             {"colour_levels", a.colour_levels},
             {"invariants_hold", problem.empty()},
             {"problem", problem}};
      if (n > 0) {
        const erl::AssignedFamily af = erl::assignment_family(a, n);
        res["family"] = erl::family_json(af.family);
        res["refining_colourings"] = erl::count_json(erl::refining_count(af));
      }
    } else {
      throw erl::UsageError("unknown construction '" + what + "' (middle, paired, assignment)");
    }
    emit(out, res);
  });
}

// --- acceptance -------------------------------------------------------------------

int erl_acceptance_count(void) { return erl::kAcceptanceCount; }

erl_status erl_acceptance_run(int id, int with_time, int* pass, char** out) {
  return guard([&] {
    if (pass == nullptr) throw erl::UsageError("null argument");
    const erl::AcceptanceResult res = erl::run_acceptance(id);
    *pass = res.pass ? 1 : 0;
    emit(out, erl::acceptance_json(res, with_time != 0));
  });
}

}  // extern "C"
