#include "rankcal/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankcal/errors.hpp"
#include "rankcal/histogram.hpp"

namespace rankcal {

ObservationPosition observation_position(const PreRankVector& preranks) {
  if (preranks.size() < 1) throw InvalidInput("empty pre-rank vector");
  const double obs = preranks.observation();
  ObservationPosition pos;
  for (double v : preranks.values()) {
    if (v < obs) {
      ++pos.below;
    } else if (v == obs) {
      ++pos.tied;
    }
  }
  return pos;
}

int rank_of_observation(const PreRankVector& preranks, RandomSource& rng) {
  const auto pos = observation_position(preranks);
  const std::uint64_t offset = pos.tied > 1 ? rng.uniform_index(pos.tied) : 0;
  return static_cast<int>(pos.below + 1 + offset);
}

int rank_of_observation(const ForecastCase& c, const PreRankVector& preranks, RandomSource& rng) {
  if (preranks.size() != c.size()) {
    throw InvalidInput("pre-rank vector has " + std::to_string(preranks.size()) +
                       " entries for a set of size " + std::to_string(c.size()));
  }
  return rank_of_observation(preranks, rng);
}

std::vector<int> rank_all(const PreRankVector& preranks, RandomSource& rng) {
  const std::size_t m = preranks.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preranks[a] < preranks[b]; });
  std::vector<int> ranks(m);
  std::size_t start = 0;
  while (start < m) {
    std::size_t stop = start + 1;
    while (stop < m && preranks[order[stop]] == preranks[order[start]]) ++stop;
    // Fisher-Yates over the tie group.
    for (std::size_t i = stop - start; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
      std::swap(order[start + i - 1], order[start + j]);
    }
    for (std::size_t p = start; p < stop; ++p) ranks[order[p]] = static_cast<int>(p + 1);
    start = stop;
  }
  return ranks;
}

RankHistogram::RankHistogram(std::size_t m) : counts_(m, 0) {
  if (m < 1) throw InvalidInput("histogram needs at least one bin");
}

void RankHistogram::add(int rank) {
  if (rank < 1 || static_cast<std::size_t>(rank) > counts_.size()) {
    throw InvalidInput("rank " + std::to_string(rank) + " outside 1.." +
                       std::to_string(counts_.size()));
  }
  ++counts_[static_cast<std::size_t>(rank - 1)];
  ++n_cases_;
}

void RankHistogram::merge(const RankHistogram& other) {
  if (other.m() != m()) throw InvalidInput("cannot merge histograms with different m");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  n_cases_ += other.n_cases_;
}

RankHistogram accumulate_histogram(std::span<const int> ranks, std::size_t m) {
  RankHistogram h(m);
  for (int r : ranks) h.add(r);
  return h;
}

HistogramSummary histogram_summary(const RankHistogram& h) {
  if (h.n_cases() == 0) throw EmptyHistogram();
  const double n = static_cast<double>(h.n_cases());
  const auto counts = h.counts();
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += static_cast<double>(i + 1) * counts[i];
  HistogramSummary s;
  s.mean_rank = sum / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double dev = static_cast<double>(i + 1) - s.mean_rank;
    ss += dev * dev * counts[i];
  }
  s.rank_variance = ss / n;
  const double expected = n / static_cast<double>(counts.size());
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    s.chi_square += diff * diff / expected;
  }
  return s;
}

}  // namespace rankcal
