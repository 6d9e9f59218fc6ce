#include "rankcal/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rankcal/cli/case_io.hpp"
#include "rankcal/cli/report.hpp"
#include "rankcal/cli/verify.hpp"
#include "rankcal/csv.hpp"
#include "rankcal/errors.hpp"
#include "rankcal/oracle.hpp"
#include "rankcal/parallel.hpp"
#include "rankcal/postprocess.hpp"
#include "rankcal/ranking.hpp"
#include "rankcal/scenario.hpp"
#include "rankcal/series_io.hpp"

namespace fs = std::filesystem;

namespace rankcal::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RANKCAL_SEED")) {
    std::int64_t v = 0;
    if (csv::parse_int(env, v) && v >= 0) return static_cast<std::uint64_t>(v);
    throw InvalidParameter("RANKCAL_SEED must be a nonnegative integer");
  }
  return 1;
}

std::string method_list_name(const std::vector<PreRankMethod>& methods) {
  std::string out;
  for (const auto& m : methods) {
    if (!out.empty()) out += ',';
    out += m.kind == Method::mst && m.standardize ? "mst-std" : std::string(method_name(m.kind));
  }
  return out;
}

std::string file_tag(const PreRankMethod& m) {
  return m.kind == Method::mst && m.standardize ? "mst-std" : std::string(method_name(m.kind));
}

/// Collects written files so the manifest can list them.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, std::string_view text) {
    write_text(dir_ / name, text);
    files_.push_back(name);
  }

  void finish(RunManifest manifest, Clock::time_point start) {
    std::sort(files_.begin(), files_.end());
    manifest.outputs = files_;
    manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    write_text(dir_ / "manifest.json", dump_json(manifest.to_json()));
  }

  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

void write_histogram_set(OutputDir& dir, const std::string& tag, const std::string& title,
                         const RankHistogram& h, bool svg) {
  dir.write("hist_" + tag + ".csv", histogram_csv(h));
  dir.write("summary_" + tag + ".json", dump_json(summary_json(tag, h)));
  if (svg) dir.write("hist_" + tag + ".svg", histogram_svg(title, h));
}

std::string summary_line(const std::string& tag, const RankHistogram& h) {
  std::ostringstream os;
  os << tag << ": n=" << h.n_cases();
  if (h.n_cases() > 0) {
    const auto s = histogram_summary(h);
    os << " mean_rank=" << s.mean_rank << " rank_variance=" << s.rank_variance
       << " chi_square=" << s.chi_square;
  }
  return os.str();
}

// --- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string scenario = "iid:0:1";
  std::string obs_scenario = "iid:0:1";
  std::string method = "all";
  std::size_t m = 20;
  std::size_t d = 3;
  std::size_t cases = 10000;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  bool svg = false;
  bool write_cases = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const std::uint64_t seed = o.seed.value_or(default_seed());
  const auto methods = parse_method_list(o.method);
  ScenarioConfig config;
  config.observation = parse_scenario(o.obs_scenario, o.d);
  config.forecast = parse_scenario(o.scenario, o.d);
  config.m = o.m;
  config.d = o.d;
  config.n_cases = o.cases;
  config.seed = seed;
  config.workers = o.workers;
  config.validate();

  OutputDir dir(o.out);
  const auto ranks = simulate_ranks(config, methods);
  for (std::size_t q = 0; q < methods.size(); ++q) {
    RankHistogram h(config.m);
    for (const auto& row : ranks) h.add(row[q]);
    const auto tag = file_tag(methods[q]);
    write_histogram_set(dir, tag, tag + " rank histogram", h, o.svg);
    out << summary_line(tag, h) << '\n';
    if (o.write_cases) {
      std::ostringstream os;
      os << "case_id,rank\n";
      for (std::size_t i = 0; i < ranks.size(); ++i) os << i << ',' << ranks[i][q] << '\n';
      dir.write("ranks_" + tag + ".csv", os.str());
    }
  }
  if (o.write_cases) {
    const ScenarioSampler sampler(config);
    std::vector<ForecastCase> cases;
    cases.reserve(config.n_cases);
    for (std::size_t i = 0; i < config.n_cases; ++i) cases.push_back(sampler.sample(i));
    std::ostringstream os;
    write_cases(os, cases);
    dir.write("cases.csv", os.str());
  }

  RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.seed = seed;
  manifest.workers = o.workers;
  manifest.argv = {"simulate", "--scenario", o.scenario, "--obs-scenario", o.obs_scenario,
                   "--method", method_list_name(methods), "--m", std::to_string(o.m),
                   "--d", std::to_string(o.d), "--cases", std::to_string(o.cases),
                   "--seed", std::to_string(seed), "--workers", std::to_string(o.workers),
                   "--out", fs::absolute(o.out).string()};
  if (o.svg) manifest.argv.push_back("--svg");
  if (o.write_cases) manifest.argv.push_back("--write-cases");
  manifest.parameters = {{"scenario", o.scenario},   {"obs_scenario", o.obs_scenario},
                         {"method", method_list_name(methods)}, {"m", o.m},
                         {"d", o.d},                 {"cases", o.cases},
                         {"svg", o.svg},             {"write_cases", o.write_cases}};
  dir.finish(std::move(manifest), start);
  return exit_ok;
}

// --- rank -----------------------------------------------------------------

struct RankOptions {
  std::string in;
  std::string method = "avg";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  bool svg = false;
};

int cmd_rank(const RankOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const std::uint64_t seed = o.seed.value_or(default_seed());
  const auto methods = parse_method_list(o.method);
  std::ifstream in(o.in, std::ios::binary);
  if (!in) throw InvalidInput("cannot read case file '" + o.in + "'");
  const auto cases = read_cases(in);

  OutputDir dir(o.out);
  std::vector<std::vector<int>> ranks(cases.size());
  parallel_for(cases.size(), o.workers, [&](std::size_t i) {
    try {
      const auto preranks = compute_preranks(cases[i], methods);
      ranks[i].resize(methods.size());
      for (std::size_t q = 0; q < methods.size(); ++q) {
        ranks[i][q] = rank_of_observation(preranks[q], [&] { return tie_stream(seed, i, methods[q]); });
      }
    } catch (const std::exception& e) {
      throw CaseError(i, "id '" + cases[i].id() + "': " + e.what());
    }
  });
  for (std::size_t q = 0; q < methods.size(); ++q) {
    const auto tag = file_tag(methods[q]);
    std::ostringstream os;
    os << "case_id,rank\n";
    for (std::size_t i = 0; i < cases.size(); ++i) os << cases[i].id() << ',' << ranks[i][q] << '\n';
    dir.write("ranks_" + tag + ".csv", os.str());
    if (!cases.empty()) {
      RankHistogram h(cases.front().size());
      bool uniform_m = true;
      for (std::size_t i = 0; i < cases.size(); ++i) {
        if (cases[i].size() != h.m()) {
          uniform_m = false;
          break;
        }
        h.add(ranks[i][q]);
      }
      if (uniform_m) {
        write_histogram_set(dir, tag, tag + " rank histogram", h, o.svg);
        out << summary_line(tag, h) << '\n';
      }
    }
  }
  out << cases.size() << " case(s) ranked\n";

  RunManifest manifest;
  manifest.subcommand = "rank";
  manifest.seed = seed;
  manifest.workers = o.workers;
  const auto input = fs::absolute(o.in).string();
  manifest.inputs = {input};
  manifest.argv = {"rank", "--in", input, "--method", method_list_name(methods),
                   "--seed", std::to_string(seed), "--workers", std::to_string(o.workers),
                   "--out", fs::absolute(o.out).string()};
  if (o.svg) manifest.argv.push_back("--svg");
  manifest.parameters = {{"in", input}, {"method", method_list_name(methods)}, {"svg", o.svg}};
  dir.finish(std::move(manifest), start);
  return exit_ok;
}

// --- postprocess ----------------------------------------------------------

struct PostprocessOptions {
  std::string in;
  std::string synthetic;
  std::string strategy = "independent";
  std::size_t window = 50;
  std::string methods = "all";
  bool no_inflate = false;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  bool svg = false;
  bool write_series = false;
};

int cmd_postprocess(const PostprocessOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const std::uint64_t seed = o.seed.value_or(default_seed());
  const auto methods = parse_method_list(o.methods);
  PostprocessConfig config;
  config.window = o.window;
  config.strategy = parse_strategy(o.strategy);
  config.inflate = !o.no_inflate;
  config.seed = seed;
  config.workers = o.workers;
  config.validate();

  std::optional<ForecastSeries> series;
  std::string source;
  if (!o.in.empty()) {
    std::ifstream in(o.in, std::ios::binary);
    if (!in) throw InvalidInput("cannot read series file '" + o.in + "'");
    series.emplace(read_series(in));
    source = fs::absolute(o.in).string();
  } else {
    const auto spec = parse_synthetic_spec(o.synthetic);
    series.emplace(synthetic_series(spec));
    source = format_synthetic_spec(spec);
  }
  if (series->size() <= config.window) {
    throw InsufficientHistory(config.window + 1, series->size());
  }

  OutputDir dir(o.out);
  if (o.write_series) {
    std::ostringstream os;
    write_series(os, *series);
    dir.write("series.csv", os.str());
  }
  const auto result = run_pipeline(*series, config, methods);
  {
    std::ostringstream os;
    os << "lead,rank,count\n";
    nlohmann::ordered_json leads = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < result.univariate.size(); ++k) {
      const auto& h = result.univariate[k];
      for (std::size_t r = 0; r < h.m(); ++r) os << (k + 1) << ',' << (r + 1) << ',' << h.counts()[r] << '\n';
      auto j = summary_json("univariate", h);
      j["lead"] = k + 1;
      leads.push_back(std::move(j));
      if (o.svg) dir.write("univariate_lead" + std::to_string(k + 1) + ".svg", histogram_svg("lead " + std::to_string(k + 1), h));
    }
    dir.write("univariate.csv", os.str());
    dir.write("univariate_summary.json", dump_json(leads));
  }
  for (std::size_t q = 0; q < methods.size(); ++q) {
    const auto tag = file_tag(methods[q]);
    write_histogram_set(dir, tag, tag + " rank histogram (" + o.strategy + ")", result.multivariate[q], o.svg);
    out << summary_line(tag, result.multivariate[q]) << '\n';
  }
  out << result.verification_days << " verification day(s), " << result.members << " member(s)\n";

  RunManifest manifest;
  manifest.subcommand = "postprocess";
  manifest.seed = seed;
  manifest.workers = o.workers;
  manifest.argv = {"postprocess"};
  if (!o.in.empty()) {
    manifest.inputs = {source};
    manifest.argv.insert(manifest.argv.end(), {"--in", source});
  } else {
    manifest.argv.insert(manifest.argv.end(), {"--synthetic", source});
  }
  manifest.argv.insert(manifest.argv.end(),
                       {"--strategy", o.strategy, "--window", std::to_string(o.window), "--methods",
                        method_list_name(methods), "--seed", std::to_string(seed), "--workers",
                        std::to_string(o.workers), "--out", fs::absolute(o.out).string()});
  if (o.no_inflate) manifest.argv.push_back("--no-inflate");
  if (o.svg) manifest.argv.push_back("--svg");
  if (o.write_series) manifest.argv.push_back("--write-series");
  manifest.parameters = {{"source", source},
                         {"strategy", o.strategy},
                         {"window", o.window},
                         {"methods", method_list_name(methods)},
                         {"inflate", !o.no_inflate},
                         {"verification_days", result.verification_days}};
  dir.finish(std::move(manifest), start);
  return exit_ok;
}

// --- oracle / verify / rerun ----------------------------------------------

struct OracleOptions {
  std::int64_t m = 20;
  std::int64_t d = 5;
  std::string out;
};

int cmd_oracle(const OracleOptions& o, std::ostream& out) {
  const auto start = Clock::now();
  const auto r = oracle::report(o.m, o.d);
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["d"] = r.d;
  j["expected_prerank_avg"] = r.expected_prerank_avg;
  j["expected_prerank_bd"] = r.expected_prerank_bd;
  j["var_avg_member"] = r.var_avg_member;
  j["var_avg_obs"] = r.var_avg_obs;
  j["var_bd_member"] = r.var_bd_member;
  j["var_bd_obs"] = r.var_bd_obs;
  j["rank_covariance"] = r.rank_covariance;
  j["var_bd_member_exact"] = r.var_bd_member_exact;
  j["var_bd_obs_exact"] = r.var_bd_obs_exact;
  const auto text = dump_json(j);
  out << text;
  if (!o.out.empty()) {
    OutputDir dir(o.out);
    dir.write("oracle.json", text);
    RunManifest manifest;
    manifest.subcommand = "oracle";
    manifest.argv = {"oracle", "--m", std::to_string(o.m), "--d", std::to_string(o.d), "--out",
                     fs::absolute(o.out).string()};
    manifest.parameters = {{"m", o.m}, {"d", o.d}};
    dir.finish(std::move(manifest), start);
  }
  return exit_ok;
}

int cmd_verify(const std::string& suite, std::ostream& out) {
  const auto ids = verify::suite_criteria(suite);
  bool ok = true;
  for (int id : ids) {
    const auto r = verify::run_criterion(id);
    out << verify::format_result(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? exit_ok : exit_verification;
}

struct RerunOptions {
  std::string manifest;
  std::string out;
  std::optional<unsigned> workers;
};

std::vector<std::string> rerun_args(const RerunOptions& o) {
  const auto m = RunManifest::from_json(nlohmann::json::parse(read_text(o.manifest)));
  auto args = m.argv;
  if (args.empty() || args.front() == "rerun") throw InvalidInput("manifest has no replayable command");
  auto set_flag = [&](const std::string& flag, const std::string& value) {
    auto it = std::find(args.begin(), args.end(), flag);
    if (it != args.end() && std::next(it) != args.end()) {
      *std::next(it) = value;
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  };
  if (!o.out.empty()) set_flag("--out", fs::absolute(o.out).string());
  if (o.workers && args.front() != "oracle") set_flag("--workers", std::to_string(*o.workers));
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank histograms for multivariate ensemble forecast calibration"};
  app.name("rankcal");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate Gaussian scenarios and write rank histograms");
  simulate->add_option("--scenario", sim.scenario, "Forecast scenario: iid:<mu>:<sigma>, ar1:<tau>, corr-a|b|c, identical")->capture_default_str();
  simulate->add_option("--obs-scenario", sim.obs_scenario, "Observation scenario")->capture_default_str();
  simulate->add_option("--method", sim.method, "mv, bd, avg, mst, mst-std, a comma list, or all")->capture_default_str();
  simulate->add_option("--m", sim.m, "Ensemble set size (members + observation)")->capture_default_str()->check(CLI::Range(2, 1000000));
  simulate->add_option("--d", sim.d, "Dimension")->capture_default_str()->check(CLI::Range(1, 1000000));
  simulate->add_option("--cases", sim.cases, "Number of forecast cases")->capture_default_str()->check(CLI::Range(1, 1000000000));
  simulate->add_option("--seed", sim.seed, "Seed (default: RANKCAL_SEED or 1)");
  simulate->add_option("--workers", sim.workers, "Worker threads")->capture_default_str()->check(CLI::Range(1, 1024));
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_flag("--svg", sim.svg, "Also write SVG bar charts");
  simulate->add_flag("--write-cases", sim.write_cases, "Also write the sampled cases and per-case ranks");

  RankOptions rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank observations of cases read from a CSV file");
  rank_cmd->add_option("--in", rank.in, "Case file")->required();
  rank_cmd->add_option("--method", rank.method, "Pre-rank method(s)")->capture_default_str();
  rank_cmd->add_option("--seed", rank.seed, "Seed for tie resolution (default: RANKCAL_SEED or 1)");
  rank_cmd->add_option("--workers", rank.workers, "Worker threads")->capture_default_str()->check(CLI::Range(1, 1024));
  rank_cmd->add_option("--out", rank.out, "Output directory")->required();
  rank_cmd->add_flag("--svg", rank.svg, "Also write SVG bar charts");

  PostprocessOptions post;
  auto* post_cmd = app.add_subcommand("postprocess", "Bias correction and error dressing with rolling training windows");
  auto* in_opt = post_cmd->add_option("--in", post.in, "Series file");
  auto* syn_opt = post_cmd->add_option("--synthetic", post.synthetic, "Synthetic series spec: default or key=value,...");
  in_opt->excludes(syn_opt);
  post_cmd->add_option("--strategy", post.strategy, "independent, ecc or mvn")->capture_default_str();
  post_cmd->add_option("--window", post.window, "Training days")->capture_default_str()->check(CLI::Range(2, 100000));
  post_cmd->add_option("--methods", post.methods, "Multivariate pre-rank methods")->capture_default_str();
  post_cmd->add_flag("--no-inflate", post.no_inflate, "Do not inflate errors for regression uncertainty");
  post_cmd->add_option("--seed", post.seed, "Seed (default: RANKCAL_SEED or 1)");
  post_cmd->add_option("--workers", post.workers, "Worker threads")->capture_default_str()->check(CLI::Range(1, 1024));
  post_cmd->add_option("--out", post.out, "Output directory")->required();
  post_cmd->add_flag("--svg", post.svg, "Also write SVG bar charts");
  post_cmd->add_flag("--write-series", post.write_series, "Also write the input series as CSV");

  OracleOptions orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print closed-form pre-rank moments as JSON");
  oracle_cmd->add_option("--m", orc.m, "Ensemble set size")->capture_default_str();
  oracle_cmd->add_option("--d", orc.d, "Dimension")->capture_default_str();
  oracle_cmd->add_option("--out", orc.out, "Optional output directory");

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run acceptance checks");
  verify_cmd->add_option("--suite", suite, "figures, tables, appendix, postprocess, determinism or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"figures", "tables", "appendix", "postprocess", "determinism", "all"}));

  RerunOptions rerun;
  auto* rerun_cmd = app.add_subcommand("rerun", "Replay a run from its manifest");
  rerun_cmd->add_option("--manifest", rerun.manifest, "manifest.json of an earlier run")->required();
  rerun_cmd->add_option("--out", rerun.out, "Output directory (default: the recorded one)");
  rerun_cmd->add_option("--workers", rerun.workers, "Override the worker count");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*rank_cmd) return cmd_rank(rank, out);
    if (*post_cmd) {
      if (post.in.empty() && post.synthetic.empty()) {
        err << "postprocess: one of --in or --synthetic is required\n";
        return exit_usage;
      }
      return cmd_postprocess(post, out);
    }
    if (*oracle_cmd) return cmd_oracle(orc, out);
    if (*verify_cmd) return cmd_verify(suite, out);
    if (*rerun_cmd) return run(rerun_args(rerun), out, err);
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}

}  // namespace rankcal::cli
