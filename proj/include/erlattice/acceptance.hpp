#pragma once

#include <string>
#include <vector>

#include "erlattice/serialize.hpp"

namespace erl {

struct AcceptanceLine {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct AcceptanceResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<AcceptanceLine> lines;  // sub-checks; all must pass
  json payload;                       // deterministic for fixed seeds
  double seconds = 0;                 // wall time, kept out of the payload
  double time_limit = 0;
};

inline constexpr int kAcceptanceCount = 10;

/// Runs criterion id (1..10).
AcceptanceResult run_acceptance(int id);

json acceptance_json(const AcceptanceResult& res, bool with_time);

}  // namespace erl
