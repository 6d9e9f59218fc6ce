#pragma once

#include <cstdint>
#include <type_traits>
#include <vector>

#include "rankcal/forecast_case.hpp"
#include "rankcal/random.hpp"

namespace rankcal {

/// Rank of the observation's pre-rank among all m pre-ranks. When t values
/// tie with the observation, the rank is uniform over the t tied positions.
int rank_of_observation(const ForecastCase& c, const PreRankVector& preranks, RandomSource& rng);

/// Overload without the case, for callers holding only pre-ranks.
int rank_of_observation(const PreRankVector& preranks, RandomSource& rng);

struct ObservationPosition {
  std::uint64_t below = 0;
  /// Pre-ranks equal to the observation's, the observation included.
  std::uint64_t tied = 0;
};

ObservationPosition observation_position(const PreRankVector& preranks);

/// Same result as rank_of_observation(preranks, rng) with rng = make_rng(),
/// but the stream is only built when the observation is tied.
template <typename MakeRng>
  requires std::is_invocable_r_v<RandomSource, MakeRng>
int rank_of_observation(const PreRankVector& preranks, MakeRng&& make_rng) {
  const auto pos = observation_position(preranks);
  if (pos.tied <= 1) return static_cast<int>(pos.below + 1);
  RandomSource rng = make_rng();
  return static_cast<int>(pos.below + 1 + rng.uniform_index(pos.tied));
}

/// Full ranking of every element, ties broken by a uniform random permutation
/// within each tie group. The result is a permutation of 1..m.
std::vector<int> rank_all(const PreRankVector& preranks, RandomSource& rng);

}  // namespace rankcal
