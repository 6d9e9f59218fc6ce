#include "rankcal/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "rankcal/errors.hpp"
#include "rankcal/parallel.hpp"
#include "rankcal/ranking.hpp"

namespace rankcal {

namespace {

double parse_number(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InvalidParameter("bad number '" + std::string(text) + "' in scenario '" +
                           std::string(spec) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == s.npos ? s.npos : pos - start));
    if (pos == s.npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ScenarioModel parse_scenario(std::string_view spec, std::size_t d) {
  const auto parts = split(spec, ':');
  const auto name = parts.front();
  auto expect_args = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw InvalidParameter("scenario '" + std::string(spec) + "' expects " + std::to_string(n) +
                             " parameter(s)");
    }
  };
  ScenarioModel model;
  model.mean.assign(d, 0.0);
  if (name == "iid") {
    expect_args(2);
    const double mu = parse_number(parts[1], spec);
    model.covariance = CovarianceModel::identity(d, parse_number(parts[2], spec));
    model.mean.assign(d, mu);
  } else if (name == "ar1") {
    expect_args(1);
    model.covariance = CovarianceModel::ar1(d, parse_number(parts[1], spec));
  } else if (name == "corr-a") {
    expect_args(0);
    model.covariance = CovarianceModel::damped_cosine(d);
  } else if (name == "corr-b") {
    expect_args(0);
    model.covariance = CovarianceModel::long_range(d);
  } else if (name == "corr-c") {
    expect_args(0);
    model.covariance = CovarianceModel::truncated_linear(d);
  } else if (name == "identical") {
    expect_args(0);
    model.covariance = CovarianceModel::fully_dependent(d);
  } else {
    throw InvalidParameter("unknown scenario '" + std::string(spec) + "'");
  }
  return model;
}

void ScenarioConfig::validate() const {
  if (m < 2) throw InvalidParameter("ensemble set size m must be >= 2");
  if (d < 1) throw InvalidParameter("dimension d must be >= 1");
  if (n_cases < 1) throw InvalidParameter("number of cases must be >= 1");
  if (observation.covariance.d != d || forecast.covariance.d != d ||
      observation.mean.size() != d || forecast.mean.size() != d) {
    throw InvalidParameter("observation and forecast models must both have dimension d");
  }
}

ScenarioSampler::ScenarioSampler(const ScenarioConfig& config)
    : m_(config.m),
      d_(config.d),
      seed_(config.seed),
      observation_((config.validate(), config.observation.covariance), config.observation.mean),
      forecast_(config.forecast.covariance, config.forecast.mean) {}

ForecastCase ScenarioSampler::sample(std::size_t case_index, RandomSource& rng) const {
  std::vector<double> values(m_ * d_);
  std::span<double> all(values);
  observation_.draw(rng, all.subspan((m_ - 1) * d_, d_));
  for (std::size_t j = 0; j + 1 < m_; ++j) forecast_.draw(rng, all.subspan(j * d_, d_));
  return ForecastCase::from_rows(m_, d_, std::move(values), std::to_string(case_index));
}

ForecastCase ScenarioSampler::sample(std::size_t case_index) const {
  RandomSource rng = RandomSource::derived(seed_, case_index, stream::sampling);
  return sample(case_index, rng);
}

ForecastCase sample_gaussian_case(const ScenarioConfig& config, std::size_t case_index,
                                  RandomSource& rng) {
  return ScenarioSampler(config).sample(case_index, rng);
}

RandomSource tie_stream(std::uint64_t seed, std::size_t case_index, const PreRankMethod& method) {
  const std::uint64_t tag = stream::ties + 2 * static_cast<std::uint64_t>(method.kind) +
                            (method.standardize ? 1 : 0);
  return RandomSource::derived(seed, case_index, tag);
}

std::vector<std::vector<int>> simulate_ranks(const ScenarioConfig& config,
                                             const std::vector<PreRankMethod>& methods) {
  const ScenarioSampler sampler(config);
  std::vector<std::vector<int>> ranks(config.n_cases);
  parallel_for(config.n_cases, config.workers, [&](std::size_t i) {
    try {
      const ForecastCase c = sampler.sample(i);
      const auto preranks = compute_preranks(c, methods);
      auto& row = ranks[i];
      row.resize(methods.size());
      for (std::size_t k = 0; k < methods.size(); ++k) {
        row[k] = rank_of_observation(preranks[k], [&] { return tie_stream(config.seed, i, methods[k]); });
      }
    } catch (const CaseError&) {
      throw;
    } catch (const std::exception& e) {
      throw CaseError(i, e.what());
    }
  });
  return ranks;
}

std::vector<RankHistogram> run_scenario(const ScenarioConfig& config,
                                        const std::vector<PreRankMethod>& methods) {
  const auto ranks = simulate_ranks(config, methods);
  std::vector<RankHistogram> out(methods.size(), RankHistogram(config.m));
  for (const auto& row : ranks) {
    for (std::size_t k = 0; k < methods.size(); ++k) out[k].add(row[k]);
  }
  return out;
}

RankHistogram run_scenario(const ScenarioConfig& config, const PreRankMethod& method) {
  return run_scenario(config, std::vector<PreRankMethod>{method}).front();
}

RankMoments rank_moments(const ScenarioConfig& config, const PreRankMethod& method) {
  const ScenarioSampler sampler(config);
  const std::size_t m = config.m;
  // Per case: observation rank, sum and sum of squares of member ranks.
  std::vector<std::array<double, 3>> per_case(config.n_cases);
  parallel_for(config.n_cases, config.workers, [&](std::size_t i) {
    const ForecastCase c = sampler.sample(i);
    RandomSource rng = tie_stream(config.seed, i, method);
    const auto ranks = rank_all(compute_preranks(c, method), rng);
    double s = 0.0, ss = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      s += ranks[j];
      ss += static_cast<double>(ranks[j]) * ranks[j];
    }
    per_case[i] = {static_cast<double>(ranks[m - 1]), s, ss};
  });
  const double n = static_cast<double>(config.n_cases);
  const double n_members = n * static_cast<double>(m - 1);
  double obs_sum = 0.0, mem_sum = 0.0, mem_ss = 0.0;
  for (const auto& row : per_case) {
    obs_sum += row[0];
    mem_sum += row[1];
    mem_ss += row[2];
  }
  RankMoments out;
  out.observation_mean = obs_sum / n;
  double obs_dev = 0.0;
  for (const auto& row : per_case) obs_dev += (row[0] - out.observation_mean) * (row[0] - out.observation_mean);
  out.observation_variance = obs_dev / n;
  out.member_mean = mem_sum / n_members;
  out.member_variance = mem_ss / n_members - out.member_mean * out.member_mean;
  return out;
}

}  // namespace rankcal
