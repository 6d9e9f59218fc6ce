#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rankcal {

/// Counts of observation ranks 1..m. counts()[r - 1] holds rank r.
class RankHistogram {
 public:
  explicit RankHistogram(std::size_t m);

  void add(int rank);
  void merge(const RankHistogram& other);

  std::size_t m() const noexcept { return counts_.size(); }
  std::uint64_t n_cases() const noexcept { return n_cases_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t count(int rank) const { return counts_.at(static_cast<std::size_t>(rank - 1)); }

  friend bool operator==(const RankHistogram&, const RankHistogram&) = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_cases_ = 0;
};

struct HistogramSummary {
  double mean_rank = 0.0;
  double rank_variance = 0.0;
  /// Pearson statistic against the uniform law on 1..m (m - 1 dof).
  /// Descriptive only: forecast cases are usually serially dependent.
  double chi_square = 0.0;
};

RankHistogram accumulate_histogram(std::span<const int> ranks, std::size_t m);

HistogramSummary histogram_summary(const RankHistogram& h);

}  // namespace rankcal
