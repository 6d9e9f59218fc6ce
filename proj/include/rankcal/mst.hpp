#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rankcal/forecast_case.hpp"

namespace rankcal {

/// Pairwise Euclidean distances among n points, upper triangle only.
class DistanceCache {
 public:
  /// points is row-major n x d.
  DistanceCache(std::span<const double> points, std::size_t d);
  explicit DistanceCache(const ForecastCase& c);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return dist_[offset(i) + (j - i - 1)];
  }

 private:
  std::size_t offset(std::size_t i) const noexcept { return i * (2 * n_ - i - 1) / 2; }

  std::size_t n_;
  std::vector<double> dist_;
};

/// Total edge length of a minimum spanning tree over all cached points, or
/// over all but `excluded`. Dense Prim, O(n^2).
double mst_length(const DistanceCache& cache, std::optional<std::size_t> excluded = std::nullopt);

/// Convenience overload for row-major n x d points; needs n >= 2.
double mst_length(std::span<const double> points, std::size_t d);

/// Entry i is the MST length of the cached set with point i removed.
/// Needs at least 3 points.
PreRankVector mst_length_all_removals(const DistanceCache& cache);

}  // namespace rankcal
