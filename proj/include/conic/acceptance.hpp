#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conic/report.hpp"

namespace conic {

struct SuiteOptions {
  std::uint64_t seed = 7;
  std::size_t c2_budget = 250000;
  int workers = 1;
  double tolerance_scale = 1.0;
  bool quick = true;
  std::string cache_dir;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<Check> checks;
  json detail = json::object();
  double wall_time = 0.0;
};

std::vector<int> all_criteria();
/// Module errors are caught and reported as a failed check named after the error.
CriterionResult run_criterion(int id, const SuiteOptions& opt);

}  // namespace conic
