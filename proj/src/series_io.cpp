#include "rankcal/series_io.hpp"

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "rankcal/csv.hpp"
#include "rankcal/errors.hpp"

namespace rankcal {

namespace {

struct PendingDay {
  std::int64_t day = 0;
  std::size_t first_line = 0;
  std::map<std::int64_t, std::vector<double>> rows;
};

}  // namespace

ForecastSeries read_series(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  bool header_seen = false;
  std::optional<ForecastSeries> series;
  std::optional<PendingDay> pending;

  auto flush = [&]() {
    if (!pending) return;
    const auto& rows = pending->rows;
    if (!rows.contains(0)) throw ParseError(pending->first_line, "day " + std::to_string(pending->day) + " has no observation row (member_id 0)");
    const std::size_t m_raw = rows.size() - 1;
    if (m_raw == 0) throw ParseError(pending->first_line, "day " + std::to_string(pending->day) + " has no raw members");
    if (rows.rbegin()->first != static_cast<std::int64_t>(m_raw)) {
      throw ParseError(pending->first_line, "day " + std::to_string(pending->day) + " member ids are not 0.." + std::to_string(m_raw));
    }
    if (!series) series.emplace(d, m_raw);
    if (series->raw_members() != m_raw) {
      throw ParseError(pending->first_line, "day " + std::to_string(pending->day) + " has " + std::to_string(m_raw) +
                                                " raw members, expected " + std::to_string(series->raw_members()));
    }
    ForecastDay day;
    day.day = pending->day;
    day.observation = rows.at(0);
    for (std::size_t j = 1; j <= m_raw; ++j) {
      const auto& r = rows.at(static_cast<std::int64_t>(j));
      day.raw.insert(day.raw.end(), r.begin(), r.end());
    }
    try {
      series->add_day(std::move(day));
    } catch (const InvalidInput& e) {
      throw ParseError(pending->first_line, e.what());
    }
    pending.reset();
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty()) continue;
    const auto fields = csv::split_fields(text);
    if (!header_seen) {
      if (fields.size() < 3 || fields[0] != "day" || fields[1] != "member_id") {
        throw ParseError(line_no, "expected header 'day,member_id,v1,...,vd'");
      }
      d = fields.size() - 2;
      header_seen = true;
      continue;
    }
    if (fields.size() != d + 2) {
      throw ParseError(line_no, "expected " + std::to_string(d + 2) + " fields, got " + std::to_string(fields.size()));
    }
    std::int64_t day = 0, member = 0;
    if (!csv::parse_int(fields[0], day)) throw ParseError(line_no, "bad day '" + std::string(fields[0]) + "'");
    if (!csv::parse_int(fields[1], member) || member < 0) {
      throw ParseError(line_no, "bad member_id '" + std::string(fields[1]) + "'");
    }
    std::vector<double> values(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!csv::parse_double(fields[k + 2], values[k])) {
        throw ParseError(line_no, "bad value '" + std::string(fields[k + 2]) + "'");
      }
    }
    if (pending && pending->day != day) {
      if (day < pending->day) throw ParseError(line_no, "days are not sorted ascending");
      flush();
    }
    if (!pending) pending = PendingDay{day, line_no, {}};
    if (!pending->rows.emplace(member, std::move(values)).second) {
      throw ParseError(line_no, "duplicate member_id " + std::to_string(member) + " on day " + std::to_string(day));
    }
  }
  if (!header_seen) throw ParseError(line_no + 1, "missing header row");
  flush();
  if (!series) return ForecastSeries(d, 1);
  return std::move(*series);
}

void write_series(std::ostream& out, const ForecastSeries& series) {
  const std::size_t d = series.dim();
  out << "day,member_id";
  for (std::size_t k = 1; k <= d; ++k) out << ",v" << k;
  out << '\n';
  for (const auto& day : series.days()) {
    out << day.day << ",0";
    for (double v : day.observation) out << ',' << csv::format_double(v);
    out << '\n';
    for (std::size_t j = 0; j < series.raw_members(); ++j) {
      out << day.day << ',' << (j + 1);
      for (std::size_t k = 0; k < d; ++k) out << ',' << csv::format_double(day.raw[j * d + k]);
      out << '\n';
    }
  }
}

}  // namespace rankcal
