#include "rankcal/prerank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>

#include "rankcal/errors.hpp"
#include "rankcal/mst.hpp"

namespace rankcal {

UnivariateRankTable::UnivariateRankTable(std::size_t m, std::size_t d)
    : m_(m), d_(d), ranks_(m * d, 0), ties_(m * d, 0) {}

UnivariateRankTable univariate_ranks(const ForecastCase& c) {
  const std::size_t m = c.size();
  const std::size_t d = c.dim();
  UnivariateRankTable table(m, d);
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < d; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return c.value(a, k) < c.value(b, k); });
    std::size_t start = 0;
    while (start < m) {
      std::size_t stop = start + 1;
      while (stop < m && c.value(order[stop], k) == c.value(order[start], k)) ++stop;
      const int group = static_cast<int>(stop - start);
      if (group > 1) table.has_ties_ = true;
      for (std::size_t p = start; p < stop; ++p) {
        table.ranks_[order[p] * d + k] = static_cast<int>(stop);
        table.ties_[order[p] * d + k] = group;
      }
      start = stop;
    }
  }
  return table;
}

PreRankVector prerank_multivariate(const ForecastCase& c) {
  const std::size_t m = c.size();
  const std::size_t d = c.dim();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto x = c.point(i);
    int count = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto y = c.point(j);
      bool dominated = true;
      for (std::size_t k = 0; k < d && dominated; ++k) dominated = y[k] <= x[k];
      count += dominated ? 1 : 0;
    }
    out[i] = count;
  }
  return PreRankVector(std::move(out));
}

PreRankVector prerank_band_depth(const UnivariateRankTable& t) {
  if (!t.has_ties()) return prerank_band_depth_tie_free(t);
  // With L elements strictly below, E tied (self included) and G above, the
  // pairs whose band covers the value number C(m,2) - C(L,2) - C(G,2), which
  // in terms of r = L + E is r(m - r) + E r - E(E + 1)/2.
  const std::int64_t m = static_cast<std::int64_t>(t.size());
  const std::size_t d = t.dim();
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const std::int64_t r = t.rank(i, k);
      const std::int64_t e = t.tie_count(i, k);
      total += r * (m - r) + e * r - e * (e + 1) / 2;
    }
    out[i] = static_cast<double>(total) / static_cast<double>(d);
  }
  return PreRankVector(std::move(out));
}

PreRankVector prerank_band_depth_tie_free(const UnivariateRankTable& t) {
  if (t.has_ties()) throw InvalidInput("tie-free band depth formula applied to tied data");
  const std::int64_t m = static_cast<std::int64_t>(t.size());
  const std::size_t d = t.dim();
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const std::int64_t r = t.rank(i, k);
      total += (m - r) * (r - 1);
    }
    total += static_cast<std::int64_t>(d) * (m - 1);
    out[i] = static_cast<double>(total) / static_cast<double>(d);
  }
  return PreRankVector(std::move(out));
}

PreRankVector prerank_band_depth(const ForecastCase& c) {
  return prerank_band_depth(univariate_ranks(c));
}

PreRankVector prerank_average(const UnivariateRankTable& t) {
  const std::size_t d = t.dim();
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::int64_t total = 0;
    for (std::size_t k = 0; k < d; ++k) total += t.rank(i, k);
    out[i] = static_cast<double>(total) / static_cast<double>(d);
  }
  return PreRankVector(std::move(out));
}

PreRankVector prerank_average(const ForecastCase& c) { return prerank_average(univariate_ranks(c)); }

namespace {

std::vector<double> standardized_values(const ForecastCase& c) {
  const std::size_t m = c.size();
  const std::size_t d = c.dim();
  std::vector<double> v(c.values().begin(), c.values().end());
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += v[i * d + k];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += (v[i * d + k] - mean) * (v[i * d + k] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    for (std::size_t i = 0; i < m; ++i) {
      v[i * d + k] -= mean;
      if (sd > 0.0) v[i * d + k] /= sd;
    }
  }
  return v;
}

}  // namespace

PreRankVector prerank_mst(const ForecastCase& c, bool standardize) {
  if (c.size() < 3) {
    throw InsufficientPoints("MST pre-rank needs m >= 3, got m = " + std::to_string(c.size()));
  }
  if (!standardize) return mst_length_all_removals(DistanceCache(c));
  const auto v = standardized_values(c);
  return mst_length_all_removals(DistanceCache(v, c.dim()));
}

std::string_view method_name(Method kind) {
  switch (kind) {
    case Method::multivariate: return "mv";
    case Method::band_depth: return "bd";
    case Method::average: return "avg";
    case Method::mst: return "mst";
  }
  return "?";
}

PreRankMethod parse_method(std::string_view name) {
  if (name == "mv") return {Method::multivariate, false};
  if (name == "bd") return {Method::band_depth, false};
  if (name == "avg") return {Method::average, false};
  if (name == "mst") return {Method::mst, false};
  if (name == "mst-std") return {Method::mst, true};
  throw InvalidParameter("unknown pre-rank method '" + std::string(name) + "'");
}

std::vector<PreRankMethod> all_methods() {
  return {{Method::multivariate, false},
          {Method::band_depth, false},
          {Method::average, false},
          {Method::mst, false}};
}

std::vector<PreRankMethod> parse_method_list(std::string_view names) {
  if (names == "all") return all_methods();
  std::vector<PreRankMethod> out;
  std::size_t start = 0;
  while (start <= names.size()) {
    const auto comma = names.find(',', start);
    const auto token = names.substr(start, comma == std::string_view::npos ? names.npos : comma - start);
    out.push_back(parse_method(token));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

PreRankVector compute_preranks(const ForecastCase& c, const PreRankMethod& method) {
  switch (method.kind) {
    case Method::multivariate: return prerank_multivariate(c);
    case Method::band_depth: return prerank_band_depth(c);
    case Method::average: return prerank_average(c);
    case Method::mst: return prerank_mst(c, method.standardize);
  }
  throw InvalidParameter("unknown pre-rank method");
}

std::vector<PreRankVector> compute_preranks(const ForecastCase& c,
                                            const std::vector<PreRankMethod>& methods) {
  std::optional<UnivariateRankTable> table;
  auto ranks = [&]() -> const UnivariateRankTable& {
    if (!table) table.emplace(univariate_ranks(c));
    return *table;
  };
  std::vector<PreRankVector> out;
  out.reserve(methods.size());
  for (const auto& method : methods) {
    switch (method.kind) {
      case Method::band_depth: out.push_back(prerank_band_depth(ranks())); break;
      case Method::average: out.push_back(prerank_average(ranks())); break;
      default: out.push_back(compute_preranks(c, method)); break;
    }
  }
  return out;
}

}  // namespace rankcal
