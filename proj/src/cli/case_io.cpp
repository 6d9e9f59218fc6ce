#include "rankcal/cli/case_io.hpp"

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "rankcal/csv.hpp"
#include "rankcal/errors.hpp"

namespace rankcal::cli {

namespace {

struct PendingCase {
  std::string id;
  std::size_t first_line = 0;
  std::map<std::int64_t, std::vector<double>> rows;
};

}  // namespace

std::vector<ForecastCase> read_cases(std::istream& in) {
  std::vector<ForecastCase> cases;
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  bool header_seen = false;
  std::optional<PendingCase> pending;

  auto flush = [&]() {
    if (!pending) return;
    auto& rows = pending->rows;
    const auto where = pending->first_line;
    if (!rows.contains(0)) throw ParseError(where, "case '" + pending->id + "' has no observation (member_id 0)");
    const std::size_t members = rows.size() - 1;
    if (members == 0) throw ParseError(where, "case '" + pending->id + "' has no members");
    if (rows.rbegin()->first != static_cast<std::int64_t>(members)) {
      throw ParseError(where, "case '" + pending->id + "' member ids are not 1.." + std::to_string(members));
    }
    std::vector<double> values;
    values.reserve((members + 1) * d);
    for (std::size_t j = 1; j <= members; ++j) {
      const auto& r = rows.at(static_cast<std::int64_t>(j));
      values.insert(values.end(), r.begin(), r.end());
    }
    values.insert(values.end(), rows.at(0).begin(), rows.at(0).end());
    try {
      cases.push_back(ForecastCase::from_rows(members + 1, d, std::move(values), pending->id));
    } catch (const InvalidInput& e) {
      throw ParseError(where, e.what());
    }
    pending.reset();
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty()) continue;
    const auto fields = csv::split_fields(text);
    if (!header_seen) {
      if (fields.size() < 3 || fields[0] != "case_id" || fields[1] != "member_id") {
        throw ParseError(line_no, "expected header 'case_id,member_id,v1,...,vd'");
      }
      d = fields.size() - 2;
      header_seen = true;
      continue;
    }
    if (fields.size() != d + 2) {
      throw ParseError(line_no, "expected " + std::to_string(d + 2) + " fields, got " + std::to_string(fields.size()));
    }
    std::int64_t member = 0;
    if (!csv::parse_int(fields[1], member) || member < 0) {
      throw ParseError(line_no, "bad member_id '" + std::string(fields[1]) + "'");
    }
    std::vector<double> values(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!csv::parse_double(fields[k + 2], values[k])) {
        throw ParseError(line_no, "bad value '" + std::string(fields[k + 2]) + "'");
      }
    }
    const std::string id(fields[0]);
    if (pending && pending->id != id) flush();
    if (!pending) pending = PendingCase{id, line_no, {}};
    if (!pending->rows.emplace(member, std::move(values)).second) {
      throw ParseError(line_no, "duplicate member_id " + std::to_string(member) + " in case '" + id + "'");
    }
  }
  flush();
  return cases;
}

void write_cases(std::ostream& out, const std::vector<ForecastCase>& cases) {
  if (cases.empty()) return;
  const std::size_t d = cases.front().dim();
  out << "case_id,member_id";
  for (std::size_t k = 1; k <= d; ++k) out << ",v" << k;
  out << '\n';
  for (const auto& c : cases) {
    if (c.dim() != d) throw InvalidInput("cases in one file must share the dimension");
    auto row = [&](std::size_t member_id, std::size_t index) {
      out << c.id() << ',' << member_id;
      for (double v : c.point(index)) out << ',' << csv::format_double(v);
      out << '\n';
    };
    row(0, c.observation_index());
    for (std::size_t j = 0; j + 1 < c.size(); ++j) row(j + 1, j);
  }
}

}  // namespace rankcal::cli
