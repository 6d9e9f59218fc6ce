#pragma once

#include <iosfwd>

#include "rankcal/postprocess.hpp"

namespace rankcal {

/// Series CSV: header "day,member_id,v1,...,vd", then one row per day and
/// member with member_id 0 for the observation and 1..m_raw for raw members.
/// Days ascending. Throws ParseError with the offending line number.
ForecastSeries read_series(std::istream& in);

void write_series(std::ostream& out, const ForecastSeries& series);

}  // namespace rankcal
