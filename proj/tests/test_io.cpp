#include <gtest/gtest.h>

#include <sstream>

#include "rankcal/cli/case_io.hpp"
#include "rankcal/cli/report.hpp"
#include "rankcal/csv.hpp"
#include "rankcal/errors.hpp"
#include "rankcal/random.hpp"
#include "rankcal/series_io.hpp"

using namespace rankcal;
using namespace rankcal::cli;

namespace {

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_cases(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Csv, DoublesRoundTrip) {
  RandomSource rng(41, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng.uniform_index(40)) - 20);
    double back = 0;
    ASSERT_TRUE(csv::parse_double(csv::format_double(v), back));
    ASSERT_EQ(back, v);
  }
  double x = 0;
  EXPECT_TRUE(csv::parse_double("+1.5", x));
  EXPECT_EQ(x, 1.5);
  EXPECT_FALSE(csv::parse_double("1.5x", x));
  EXPECT_FALSE(csv::parse_double("", x));
}

TEST(CaseIo, RoundTrip) {
  RandomSource rng(42, 0);
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 5; ++i) {
    std::vector<double> v(6 * 3);
    for (auto& x : v) x = rng.normal();
    cases.push_back(ForecastCase::from_rows(6, 3, v, "case" + std::to_string(i)));
  }
  std::stringstream buf;
  write_cases(buf, cases);
  const auto back = read_cases(buf);
  ASSERT_EQ(back.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back[i].id(), cases[i].id());
    EXPECT_EQ(std::vector<double>(back[i].values().begin(), back[i].values().end()),
              std::vector<double>(cases[i].values().begin(), cases[i].values().end()));
  }
}

TEST(CaseIo, ObservationIsMemberZero) {
  std::istringstream in("case_id,member_id,v1,v2\nA,1,1,4\nA,0,3,3\nA,2,2,2\n");
  const auto cases = read_cases(in);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].value(2, 0), 3.0);
  EXPECT_EQ(cases[0].value(0, 1), 4.0);
  EXPECT_EQ(cases[0].value(1, 1), 2.0);
}

TEST(CaseIo, EmptyInputs) {
  std::istringstream empty("");
  EXPECT_TRUE(read_cases(empty).empty());
  std::istringstream header("case_id,member_id,v1\n");
  EXPECT_TRUE(read_cases(header).empty());
}

TEST(CaseIo, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("id,member,v1\n"), 1u);
  EXPECT_EQ(parse_error_line("case_id,member_id,v1\nA,0,1\nA,1,x\n"), 3u);
  EXPECT_EQ(parse_error_line("case_id,member_id,v1\nA,0,1\nA,1,2,3\n"), 3u);
  EXPECT_EQ(parse_error_line("case_id,member_id,v1\nA,0,1\nA,0,2\n"), 3u);
  EXPECT_EQ(parse_error_line("case_id,member_id,v1\nA,1,1\nA,2,2\nB,0,1\nB,1,1\n"), 2u);
  EXPECT_EQ(parse_error_line("case_id,member_id,v1\nA,0,1\n"), 2u);
}

TEST(SeriesIo, RoundTripAndErrors) {
  ForecastSeries s(2, 3);
  s.add_day({4, {1, 2, 3, 4, 5, 6}, {0.5, -0.25}});
  s.add_day({5, {1.5, 2, 3, 4, 5, 6.125}, {1, 2}});
  std::stringstream buf;
  write_series(buf, s);
  const auto back = read_series(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.day(1).day, 5);
  EXPECT_EQ(back.day(1).raw, s.day(1).raw);
  EXPECT_EQ(back.day(0).observation, s.day(0).observation);

  std::istringstream unsorted("day,member_id,v1\n2,0,1\n2,1,1\n1,0,1\n1,1,1\n");
  try {
    read_series(unsorted);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::istringstream no_header("1,0,1\n");
  EXPECT_THROW(read_series(no_header), ParseError);
}

TEST(Report, HistogramOutputs) {
  RankHistogram h(3);
  h.add(1);
  h.add(3);
  h.add(3);
  EXPECT_EQ(histogram_csv(h), "rank,count\n1,1\n2,0\n3,2\n");
  const auto j = summary_json("avg", h);
  EXPECT_EQ(j["method"], "avg");
  EXPECT_EQ(j["n_cases"], 3);
  EXPECT_DOUBLE_EQ(j["mean_rank"].get<double>(), 7.0 / 3);
  EXPECT_TRUE(summary_json("avg", RankHistogram(3))["chi_square"].is_null());
  const auto svg = histogram_svg("t", h);
  EXPECT_EQ(svg, histogram_svg("t", h));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}

TEST(Report, ManifestRoundTrip) {
  RunManifest m;
  m.subcommand = "simulate";
  m.argv = {"simulate", "--m", "20"};
  m.parameters = {{"m", 20}};
  m.seed = 7;
  m.workers = 2;
  m.outputs = {"hist_avg.csv"};
  m.duration_seconds = 0.5;
  const auto j = m.to_json();
  EXPECT_EQ(j["version"], std::string(version));
  const auto back = RunManifest::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.argv, m.argv);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.outputs, m.outputs);
}
