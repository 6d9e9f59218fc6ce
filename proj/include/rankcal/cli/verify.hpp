#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rankcal::verify {

/// Seed shared by every single-run acceptance experiment.
inline constexpr std::uint64_t acceptance_seed = 2014;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int criterion_count = 10;

CriterionResult run_criterion(int id);

/// figures, tables, appendix, postprocess, determinism or all.
std::vector<int> suite_criteria(std::string_view suite);

/// "[PASS] 3 name (12.3 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace rankcal::verify
