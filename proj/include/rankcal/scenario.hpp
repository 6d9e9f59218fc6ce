#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rankcal/covariance.hpp"
#include "rankcal/forecast_case.hpp"
#include "rankcal/histogram.hpp"
#include "rankcal/prerank.hpp"
#include "rankcal/random.hpp"

namespace rankcal {

/// Gaussian model for one side of a scenario (observation or members).
struct ScenarioModel {
  CovarianceModel covariance;
  std::vector<double> mean;
};

/// Parses a catalog name for dimension d:
///   iid:<mu>:<sigma>   independent N(mu, sigma^2) components
///   ar1:<tau>          zero-mean AR(1), Cov = exp(-|i-j|/tau)
///   corr-a|corr-b|corr-c   damped cosine, long range, truncated linear
///   identical          every component equal to one N(0,1) draw
ScenarioModel parse_scenario(std::string_view spec, std::size_t d);

struct ScenarioConfig {
  ScenarioModel observation;
  ScenarioModel forecast;
  std::size_t m = 20;
  std::size_t d = 1;
  std::size_t n_cases = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  /// Throws InvalidParameter on inconsistent settings.
  void validate() const;
};

/// Error raised while processing one case, tagged with the case index.
class CaseError : public std::runtime_error {
 public:
  CaseError(std::size_t index, const std::string& what)
      : std::runtime_error("case " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Holds the factorized observation and forecast models of a scenario.
class ScenarioSampler {
 public:
  explicit ScenarioSampler(const ScenarioConfig& config);

  /// Draws the observation first, then members 1..m-1, from `rng`.
  ForecastCase sample(std::size_t case_index, RandomSource& rng) const;
  /// Uses the case's own sampling substream of RandomSource(seed, case_index).
  ForecastCase sample(std::size_t case_index) const;

 private:
  std::size_t m_;
  std::size_t d_;
  std::uint64_t seed_;
  GaussianSampler observation_;
  GaussianSampler forecast_;
};

ForecastCase sample_gaussian_case(const ScenarioConfig& config, std::size_t case_index,
                                  RandomSource& rng);

/// Tie-resolution stream for one case and method.
RandomSource tie_stream(std::uint64_t seed, std::size_t case_index, const PreRankMethod& method);

/// Observation ranks per case (outer) and method (inner).
std::vector<std::vector<int>> simulate_ranks(const ScenarioConfig& config,
                                             const std::vector<PreRankMethod>& methods);

std::vector<RankHistogram> run_scenario(const ScenarioConfig& config,
                                        const std::vector<PreRankMethod>& methods);
RankHistogram run_scenario(const ScenarioConfig& config, const PreRankMethod& method);

/// Moments of the observation's rank and of the members' ranks (pooled over
/// all members, equivalent in expectation to a randomly selected member).
struct RankMoments {
  double observation_mean = 0.0;
  double observation_variance = 0.0;
  double member_mean = 0.0;
  double member_variance = 0.0;
};

RankMoments rank_moments(const ScenarioConfig& config, const PreRankMethod& method);

}  // namespace rankcal
