#include "rankcal/mst.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rankcal/errors.hpp"

namespace rankcal {

DistanceCache::DistanceCache(std::span<const double> points, std::size_t d)
    : n_(d == 0 ? 0 : points.size() / d) {
  if (d == 0 || points.size() % d != 0) throw InvalidInput("point buffer is not n x d");
  dist_.resize(n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      double ss = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = points[i * d + k] - points[j * d + k];
        ss += diff * diff;
      }
      dist_[idx++] = std::sqrt(ss);
    }
  }
}

DistanceCache::DistanceCache(const ForecastCase& c) : DistanceCache(c.values(), c.dim()) {}

namespace {

std::vector<double> dense_matrix(const DistanceCache& cache) {
  const std::size_t n = cache.size();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) w[i * n + j] = w[j * n + i] = cache(i, j);
  }
  return w;
}

// Dense Prim over the vertices other than `excluded` (n for none). The
// frontier is kept as a compact list in index order, so a point set gives
// the same sum whether a point is excluded here or dropped beforehand.
double prim(const std::vector<double>& w, std::size_t n, std::size_t excluded,
            std::vector<std::size_t>& list, std::vector<double>& best) {
  list.clear();
  for (std::size_t v = 0; v < n; ++v) {
    if (v != excluded) list.push_back(v);
  }
  if (list.size() < 2) throw InvalidInput("minimum spanning tree needs at least 2 points");
  best.assign(list.size(), std::numeric_limits<double>::infinity());
  std::size_t cnt = list.size() - 1;
  std::size_t current = list[0];
  list[0] = list[cnt];
  double total = 0.0;
  while (cnt > 0) {
    const double* row = w.data() + current * n;
    std::size_t bi = 0;
    double bv = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cnt; ++j) {
      const double dist = row[list[j]];
      if (dist < best[j]) best[j] = dist;
      if (best[j] < bv) {
        bv = best[j];
        bi = j;
      }
    }
    total += bv;
    current = list[bi];
    --cnt;
    list[bi] = list[cnt];
    best[bi] = best[cnt];
  }
  return total;
}

}  // namespace

double mst_length(const DistanceCache& cache, std::optional<std::size_t> excluded) {
  const std::size_t n = cache.size();
  if (excluded && *excluded >= n) throw InvalidInput("excluded point out of range");
  std::vector<std::size_t> list;
  std::vector<double> best;
  return prim(dense_matrix(cache), n, excluded.value_or(n), list, best);
}

double mst_length(std::span<const double> points, std::size_t d) {
  return mst_length(DistanceCache(points, d));
}

PreRankVector mst_length_all_removals(const DistanceCache& cache) {
  if (cache.size() < 3) {
    throw InsufficientPoints("MST removal lengths need at least 3 points, got " +
                             std::to_string(cache.size()));
  }
  const std::size_t n = cache.size();
  const auto w = dense_matrix(cache);
  std::vector<std::size_t> list;
  std::vector<double> best;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = prim(w, n, i, list, best);
  return PreRankVector(std::move(out));
}

}  // namespace rankcal
