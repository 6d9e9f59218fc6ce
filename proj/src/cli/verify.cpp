#include "rankcal/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "rankcal/cli/commands.hpp"
#include "rankcal/cli/report.hpp"
#include "rankcal/errors.hpp"
#include "rankcal/mst.hpp"
#include "rankcal/oracle.hpp"
#include "rankcal/postprocess.hpp"
#include "rankcal/prerank.hpp"
#include "rankcal/random.hpp"
#include "rankcal/scenario.hpp"

namespace fs = std::filesystem;

namespace rankcal::verify {

namespace {

using Clock = std::chrono::steady_clock;

// 0.999 quantile of chi-square with 19 degrees of freedom.
constexpr double chi2_19_999 = 43.82;

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double chi_square(const RankHistogram& h) { return histogram_summary(h).chi_square; }

ScenarioConfig scenario(std::string_view obs, std::string_view fcst, std::size_t m, std::size_t d,
                        std::size_t n, std::uint64_t seed) {
  ScenarioConfig c;
  c.observation = parse_scenario(obs, d);
  c.forecast = parse_scenario(fcst, d);
  c.m = m;
  c.d = d;
  c.n_cases = n;
  c.seed = seed;
  c.workers = default_workers();
  return c;
}

/// Joins per-check verdicts into one criterion verdict and a detail line.
struct Checks {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, std::string note) {
    ok = ok && cond;
    notes.push_back((cond ? "" : "FAIL ") + std::move(note));
  }
  std::string detail() const {
    std::string out;
    for (const auto& n : notes) {
      if (!out.empty()) out += "; ";
      out += n;
    }
    return out;
  }
};

// --- 1: uniformity under calibration --------------------------------------

CriterionResult uniformity() {
  const auto start = Clock::now();
  const auto methods = all_methods();
  std::vector<int> passes(methods.size(), 0);
  std::vector<double> worst(methods.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto hists = run_scenario(scenario("iid:0:1", "iid:0:1", 20, 3, 10000, seed), methods);
    for (std::size_t q = 0; q < methods.size(); ++q) {
      const double c2 = chi_square(hists[q]);
      worst[q] = std::max(worst[q], c2);
      if (c2 < chi2_19_999) ++passes[q];
    }
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  Checks c;
  for (std::size_t q = 0; q < methods.size(); ++q) {
    c.expect(passes[q] >= 99, std::string(method_name(methods[q].kind)) + " " +
                                  std::to_string(passes[q]) + "/100 below 43.82 (max " +
                                  num(worst[q]) + ")");
  }
  c.expect(seconds < 60.0, "runtime " + num(seconds, 3) + " s < 60 s");
  return {1, "uniformity under calibration", c.ok, c.detail(), 0.0};
}

// --- 2, 3: AR(1) tables ---------------------------------------------------

struct TableCell {
  RankMoments avg;
  RankMoments bd;
};

struct TableRun {
  std::map<std::size_t, TableCell> cells;
  double seconds = 0.0;
};

const TableRun& table_run() {
  static std::once_flag once;
  static TableRun run;
  std::call_once(once, [] {
    const auto start = Clock::now();
    for (std::size_t m : {20u, 100u}) {
      const auto config = scenario("ar1:3", "ar1:2", m, 5, 30000, acceptance_seed);
      run.cells[m] = {rank_moments(config, {Method::average, false}),
                      rank_moments(config, {Method::band_depth, false})};
    }
    run.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  });
  return run;
}

void expect_near(Checks& c, const std::string& label, double value, double target, double tol) {
  c.expect(std::abs(value - target) <= tol,
           label + " " + num(value, 5) + " vs " + num(target, 5) + "±" + num(tol, 3));
}

CriterionResult table_means() {
  const auto& run = table_run();
  Checks c;
  const auto& m20 = run.cells.at(20);
  const auto& m100 = run.cells.at(100);
  expect_near(c, "m20 avg obs", m20.avg.observation_mean, 10.5, 0.2);
  expect_near(c, "m20 bd obs", m20.bd.observation_mean, 10.7, 0.2);
  expect_near(c, "m100 avg obs", m100.avg.observation_mean, 50.4, 0.2);
  expect_near(c, "m100 bd obs", m100.bd.observation_mean, 51.7, 0.2);
  expect_near(c, "m20 avg member", m20.avg.member_mean, 10.5, 0.2);
  expect_near(c, "m20 bd member", m20.bd.member_mean, 10.5, 0.2);
  expect_near(c, "m100 avg member", m100.avg.member_mean, 50.6, 0.2);
  expect_near(c, "m100 bd member", m100.bd.member_mean, 50.6, 0.2);
  c.expect(run.seconds < 120.0, "runtime " + num(run.seconds, 3) + " s < 120 s");
  return {2, "AR(1) mean ranks", c.ok, c.detail(), 0.0};
}

CriterionResult table_variances() {
  const auto& run = table_run();
  Checks c;
  const auto& m20 = run.cells.at(20);
  const auto& m100 = run.cells.at(100);
  expect_near(c, "m20 avg obs", m20.avg.observation_variance, 37, 3);
  expect_near(c, "m20 bd obs", m20.bd.observation_variance, 37, 3);
  expect_near(c, "m20 avg member", m20.avg.member_variance, 33, 3);
  expect_near(c, "m20 bd member", m20.bd.member_variance, 33, 3);
  expect_near(c, "m100 avg obs", m100.avg.observation_variance, 940, 60);
  expect_near(c, "m100 bd obs", m100.bd.observation_variance, 946, 60);
  expect_near(c, "m100 avg member", m100.avg.member_variance, 830, 55);
  expect_near(c, "m100 bd member", m100.bd.member_variance, 835, 55);
  return {3, "AR(1) rank variances", c.ok, c.detail(), 0.0};
}

// --- 4: appendix regime ---------------------------------------------------

/// Running mean and variance (population) of a stream of values.
struct Moments {
  double n = 0, sum = 0, sum_sq = 0;
  void add(double v) {
    n += 1;
    sum += v;
    sum_sq += v * v;
  }
  double mean() const { return sum / n; }
  double variance() const { return sum_sq / n - mean() * mean(); }
};

CriterionResult appendix() {
  constexpr std::size_t m = 20, d = 5, n = 30000;
  const auto config = scenario("identical", "iid:0:1", m, d, n, acceptance_seed);
  const ScenarioSampler sampler(config);
  Moments avg_member, avg_obs, bd_member, bd_obs;
  double cross = 0, mean_r = 0, pairs = 0;
  std::vector<double> obs_ranks(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = sampler.sample(i);
    const auto table = univariate_ranks(c);
    const auto avg = prerank_average(table);
    const auto bd = prerank_band_depth(table);
    const std::size_t obs = c.observation_index();
    for (std::size_t j = 0; j < m; ++j) {
      (j == obs ? avg_obs : avg_member).add(avg[j]);
      (j == obs ? bd_obs : bd_member).add(bd[j]);
    }
    for (std::size_t k = 0; k < d; ++k) obs_ranks[k] = table.rank(obs, k);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t l = k + 1; l < d; ++l) {
        cross += obs_ranks[k] * obs_ranks[l];
        pairs += 1;
      }
      mean_r += obs_ranks[k];
    }
  }
  // Component ranks of the observation all have mean (m + 1) / 2.
  mean_r /= static_cast<double>(n * d);
  const double covariance = cross / pairs - mean_r * mean_r;

  const auto ref = oracle::report(m, d);
  Checks c;
  auto rel = [&](const std::string& label, double value, double target) {
    c.expect(std::abs(value - target) <= 0.05 * std::abs(target),
             label + " " + num(value, 5) + " vs " + num(target, 6) + "±5%");
  };
  rel("avg member var", avg_member.variance(), ref.var_avg_member);
  rel("avg obs var", avg_obs.variance(), ref.var_avg_obs);
  rel("bd member var", bd_member.variance(), ref.var_bd_member);
  rel("bd obs var", bd_obs.variance(), ref.var_bd_obs);
  rel("rank covariance", covariance, ref.rank_covariance);
  c.notes.push_back("exact bd member/obs var " + num(ref.var_bd_member_exact, 6) + "/" +
                    num(ref.var_bd_obs_exact, 6));
  return {4, "appendix oracle agreement", c.ok, c.detail(), 0.0};
}

// --- 5: band depth brute force --------------------------------------------

std::int64_t covering_pairs(const ForecastCase& c, std::size_t i, std::size_t k) {
  std::int64_t count = 0;
  const double x = c.value(i, k);
  for (std::size_t a = 0; a < c.size(); ++a) {
    for (std::size_t b = a + 1; b < c.size(); ++b) {
      const double lo = std::min(c.value(a, k), c.value(b, k));
      const double hi = std::max(c.value(a, k), c.value(b, k));
      if (lo <= x && x <= hi) ++count;
    }
  }
  return count;
}

CriterionResult band_depth_brute_force() {
  RandomSource rng(acceptance_seed, 5);
  std::size_t tied_cases = 0, tie_free_cases = 0, mismatches = 0, fast_mismatches = 0;
  std::size_t literal_disagreements = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 2 + rng.uniform_index(7);
    const std::size_t d = 1 + rng.uniform_index(4);
    const bool tied = t % 2 == 0;
    std::vector<double> values(m * d);
    for (auto& v : values) v = tied ? static_cast<double>(rng.uniform_index(3)) : rng.normal();
    const auto c = ForecastCase::from_rows(m, d, std::move(values));
    const auto table = univariate_ranks(c);
    const auto bd = prerank_band_depth(table);
    bool literal_same = true;
    for (std::size_t i = 0; i < m; ++i) {
      std::int64_t total = 0, literal = 0;
      for (std::size_t k = 0; k < d; ++k) {
        total += covering_pairs(c, i, k);
        const std::int64_t r = table.rank(i, k), e = table.tie_count(i, k);
        literal += r * (static_cast<std::int64_t>(m) - r) + (r - 1) * e;
      }
      const double expected = static_cast<double>(total) / static_cast<double>(d);
      if (bd[i] != expected) ++mismatches;
      if (literal != total) literal_same = false;
    }
    if (table.has_ties()) {
      ++tied_cases;
      if (!literal_same) ++literal_disagreements;
    } else {
      ++tie_free_cases;
      const auto fast = prerank_band_depth_tie_free(table);
      for (std::size_t i = 0; i < m; ++i) {
        if (fast[i] != bd[i]) ++fast_mismatches;
      }
    }
  }
  Checks c;
  c.expect(mismatches == 0, std::to_string(mismatches) + " pre-rank mismatches vs pair enumeration over " +
                                std::to_string(tied_cases) + " tied + " +
                                std::to_string(tie_free_cases) + " tie-free cases");
  c.expect(fast_mismatches == 0,
           std::to_string(fast_mismatches) + " tie-free fast path mismatches");
  c.notes.push_back("uncorrected tie formula differs on " + std::to_string(literal_disagreements) +
                    " tied cases");
  return {5, "band depth brute-force equivalence", c.ok, c.detail(), 0.0};
}

// --- 6: MST oracle --------------------------------------------------------

/// Minimum total length over all labelled trees on n vertices, decoded from
/// every Pruefer sequence.
double exhaustive_mst(std::span<const double> pts, std::size_t n, std::size_t d) {
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = pts[a * d + k] - pts[b * d + k];
      s += t * t;
    }
    return std::sqrt(s);
  };
  if (n == 2) return dist(0, 1);
  std::vector<std::size_t> seq(n - 2, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<int> degree(n, 1);
    for (auto v : seq) ++degree[v];
    double length = 0;
    for (auto v : seq) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      length += dist(leaf, v);
      --degree[leaf];
      --degree[v];
    }
    std::size_t u = n, w = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] == 1) (u == n ? u : w) = i;
    }
    length += dist(u, w);
    best = std::min(best, length);
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

CriterionResult mst_oracle() {
  RandomSource rng(acceptance_seed, 6);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 2 + rng.uniform_index(5);
    const std::size_t d = 1 + rng.uniform_index(4);
    std::vector<double> pts(m * d);
    for (auto& v : pts) v = rng.normal();
    const double fast = mst_length(pts, d);
    const double brute = exhaustive_mst(pts, m, d);
    worst = std::max(worst, std::abs(fast - brute) / std::max(brute, 1e-300));
  }
  Checks c;
  c.expect(worst <= 1e-12, "max relative error " + num(worst, 3) + " <= 1e-12 over 200 cases");
  return {6, "MST exhaustive oracle", c.ok, c.detail(), 0.0};
}

// --- 7: shape diagnostics -------------------------------------------------

CriterionResult shapes() {
  const std::vector<PreRankMethod> methods = {{Method::multivariate, false},
                                              {Method::band_depth, false},
                                              {Method::average, false}};
  constexpr std::size_t m = 20, n = 10000;
  const double uniform = static_cast<double>(n) / m;
  Checks c;
  for (const char* fcst : {"iid:0:0.5", "iid:0:2"}) {
    const bool under = std::string_view(fcst) == "iid:0:0.5";
    for (std::size_t d : {3u, 5u, 15u}) {
      const auto h = run_scenario(scenario("iid:0:1", fcst, m, d, n, acceptance_seed), methods);
      const std::string tag = std::string(under ? "under" : "over") + " d" + std::to_string(d);
      const double lo = h[2].count(1) / uniform, hi = h[2].count(m) / uniform;
      if (under) {
        c.expect(lo > 2 && hi > 2, tag + " avg ends " + num(lo, 3) + "/" + num(hi, 3) + " x uniform > 2");
      } else {
        c.expect(lo < 0.5 && hi < 0.5, tag + " avg ends " + num(lo, 3) + "/" + num(hi, 3) + " x uniform < 0.5");
      }
      const double bottom = h[1].count(1) + h[1].count(2);
      const double top = h[1].count(m - 1) + h[1].count(m);
      if (under) {
        c.expect(bottom > 2 * top, tag + " bd bottom/top decile " + num(bottom, 5) + "/" + num(top, 5));
      } else {
        c.expect(top > 2 * bottom, tag + " bd top/bottom decile " + num(top, 5) + "/" + num(bottom, 5));
      }
      if (d == 15) {
        const double mv = chi_square(h[0]), bd = chi_square(h[1]);
        c.expect(mv < bd / 3, tag + " mv chi2 " + num(mv) + " < bd chi2/3 " + num(bd / 3));
      }
    }
  }
  return {7, "shape diagnostics", c.ok, c.detail(), 0.0};
}

// --- 8: correlation models ------------------------------------------------

CriterionResult method_sensitivity() {
  const auto methods = all_methods();
  constexpr std::size_t m = 20, d = 15, n = 10000;
  Checks c;
  {
    const auto h = run_scenario(scenario("corr-a", "ar1:3", m, d, n, acceptance_seed), methods);
    const double avg = chi_square(h[2]), mst = chi_square(h[3]);
    c.expect(avg < chi2_19_999, "a) avg chi2 " + num(avg) + " < 43.82");
    c.expect(mst > chi2_19_999, "a) mst chi2 " + num(mst) + " > 43.82");
  }
  {
    const auto h = run_scenario(scenario("corr-b", "ar1:3", m, d, n, acceptance_seed), methods);
    std::vector<double> c2;
    for (const auto& x : h) c2.push_back(chi_square(x));
    const bool largest = c2[2] >= *std::max_element(c2.begin(), c2.end());
    c.expect(largest, "b) chi2 mv/bd/avg/mst " + num(c2[0]) + "/" + num(c2[1]) + "/" + num(c2[2]) +
                          "/" + num(c2[3]) + ", avg largest");
  }
  return {8, "correlation model sensitivity", c.ok, c.detail(), 0.0};
}

// --- 9: postprocessing ----------------------------------------------------

CriterionResult postprocessing() {
  const auto series = synthetic_series(SyntheticSpec{});
  const auto methods = all_methods();
  std::map<Strategy, PipelineResult> results;
  for (Strategy s : {Strategy::independent, Strategy::ecc, Strategy::mvn}) {
    PostprocessConfig config;
    config.strategy = s;
    config.seed = acceptance_seed;
    config.workers = default_workers();
    results.emplace(s, run_pipeline(series, config, methods));
  }
  const auto& indep = results.at(Strategy::independent);
  const std::size_t days = indep.verification_days;
  const std::size_t m = indep.members + 1;
  const double uniform = static_cast<double>(days) / static_cast<double>(m);
  Checks c;
  c.expect(days >= 823, std::to_string(days) + " verification days >= 823");
  const auto& avg = indep.multivariate[2];
  const double lo = avg.count(1) / uniform, hi = avg.count(static_cast<int>(m)) / uniform;
  c.expect(lo > 1.5 && hi > 1.5, "independent avg ends " + num(lo, 3) + "/" + num(hi, 3) + " x uniform > 1.5");
  for (Strategy s : {Strategy::ecc, Strategy::mvn}) {
    for (std::size_t q : {1u, 2u}) {
      const double ref = chi_square(indep.multivariate[q]);
      const double got = chi_square(results.at(s).multivariate[q]);
      c.expect(got < 0.5 * ref, std::string(strategy_name(s)) + " " +
                                    std::string(method_name(methods[q].kind)) + " chi2 " + num(got) +
                                    " < 0.5 x " + num(ref));
    }
  }
  const double p = 1.0 / static_cast<double>(m);
  const double se = std::sqrt(static_cast<double>(days) * p * (1 - p));
  for (const auto& [s, r] : results) {
    double worst = 0;
    for (const auto& h : r.univariate) {
      for (std::size_t k = 1; k <= h.m(); ++k) {
        worst = std::max(worst, std::abs(h.count(static_cast<int>(k)) - uniform) / se);
      }
    }
    c.expect(worst <= 4, std::string(strategy_name(s)) + " univariate max |z| " + num(worst, 3) + " <= 4");
  }
  return {9, "postprocessing pipeline", c.ok, c.detail(), 0.0};
}

// --- 10: determinism ------------------------------------------------------

std::map<std::string, std::string> directory_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name != "manifest.json") out[name] = cli::read_text(e.path());
  }
  return out;
}

CriterionResult determinism() {
  const fs::path base = fs::temp_directory_path() /
                        ("rankcal-verify-" + std::to_string(RandomSource(
                            static_cast<std::uint64_t>(Clock::now().time_since_epoch().count()), 0)
                                                                .next_u64() % 1000000000));
  fs::create_directories(base);
  std::ostringstream sink;
  Checks c;
  auto cli = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  auto replay = [&](const std::string& name, const std::string& workers) {
    const auto a = base / name, b = base / (name + "-rerun");
    const int code = cli({"rerun", "--manifest", (a / "manifest.json").string(), "--out", b.string(),
                          "--workers", workers});
    const auto x = directory_contents(a), y = directory_contents(b);
    c.expect(code == 0 && !x.empty() && x == y,
             name + " rerun with " + workers + " workers: " + std::to_string(x.size()) + " files " +
                 (x == y ? "identical" : "differ"));
  };

  const auto sim = (base / "simulate").string();
  if (cli({"simulate", "--scenario", "ar1:2", "--obs-scenario", "ar1:3", "--d", "5", "--m", "20",
           "--cases", "400", "--method", "all", "--seed", "7", "--out", sim, "--svg",
           "--write-cases"}) != 0) {
    c.expect(false, "simulate failed: " + sink.str());
  } else {
    replay("simulate", "3");
    const auto ranked = (base / "rank").string();
    c.expect(cli({"rank", "--in", sim + "/cases.csv", "--method", "all", "--seed", "7", "--out",
                  ranked}) == 0,
             "rank ran");
    replay("rank", "2");
    bool same = true;
    for (const char* tag : {"mv", "bd", "avg", "mst"}) {
      const std::string file = std::string("ranks_") + tag + ".csv";
      same = same && cli::read_text(fs::path(sim) / file) == cli::read_text(fs::path(ranked) / file);
    }
    c.expect(same, "rank of written cases reproduces simulated ranks");
  }
  for (const char* strategy : {"independent", "ecc", "mvn"}) {
    const std::string name = std::string("postprocess-") + strategy;
    if (cli({"postprocess", "--synthetic", "days=140,d=4,members=20", "--strategy", strategy,
             "--window", "20", "--seed", "11", "--out", (base / name).string(), "--svg"}) != 0) {
      c.expect(false, name + " failed: " + sink.str());
      continue;
    }
    replay(name, "3");
  }
  if (cli({"oracle", "--m", "20", "--d", "5", "--out", (base / "oracle").string()}) == 0) {
    replay("oracle", "2");
  } else {
    c.expect(false, "oracle failed");
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  return {10, "determinism", c.ok, c.detail(), 0.0};
}

}  // namespace

CriterionResult run_criterion(int id) {
  static const std::map<int, std::function<CriterionResult()>> table = {
      {1, uniformity},      {2, table_means},        {3, table_variances},
      {4, appendix},        {5, band_depth_brute_force}, {6, mst_oracle},
      {7, shapes},          {8, method_sensitivity}, {9, postprocessing},
      {10, determinism}};
  const auto it = table.find(id);
  if (it == table.end()) throw InvalidParameter("unknown criterion " + std::to_string(id));
  const auto start = Clock::now();
  auto r = it->second();
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<int> suite_criteria(std::string_view suite) {
  if (suite == "figures") return {1, 7, 8};
  if (suite == "tables") return {2, 3};
  if (suite == "appendix") return {4, 5, 6};
  if (suite == "postprocess") return {9};
  if (suite == "determinism") return {10};
  if (suite == "all") {
    std::vector<int> all(criterion_count);
    std::iota(all.begin(), all.end(), 1);
    return all;
  }
  throw InvalidParameter("unknown suite '" + std::string(suite) + "'");
}

std::string format_result(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + " (" +
         secs + " s): " + r.detail;
}

}  // namespace rankcal::verify
