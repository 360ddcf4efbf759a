#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace erw {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  int threads = 1;
  std::uint64_t seed = 20250801;
};

/// Runs the full verification suite, printing one PASS/FAIL line per criterion
/// to log as results arrive. Returns all results; overall success is the
/// conjunction.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace erw
