#pragma once

#include <iosfwd>
#include <vector>

#include "rankcal/forecast_case.hpp"

namespace rankcal::cli {

/// Case CSV: header "case_id,member_id,v1,...,vd" then one row per point.
/// Rows of a case are contiguous; member_id 0 is the observation and members
/// are numbered 1..m-1. An empty file or a header without rows yields no
/// cases.
std::vector<ForecastCase> read_cases(std::istream& in);

void write_cases(std::ostream& out, const std::vector<ForecastCase>& cases);

}  // namespace rankcal::cli
