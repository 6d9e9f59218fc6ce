#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rankcal/forecast_case.hpp"

namespace rankcal {

/// Univariate ranks and tie counts of every element of S in every component.
/// rank(i, k) counts the elements j with x_jk <= x_ik, so a tie group shares
/// the largest rank of the group; tie_count(i, k) counts x_jk == x_ik.
class UnivariateRankTable {
 public:
  UnivariateRankTable(std::size_t m, std::size_t d);

  std::size_t size() const noexcept { return m_; }
  std::size_t dim() const noexcept { return d_; }
  int rank(std::size_t i, std::size_t k) const { return ranks_[i * d_ + k]; }
  int tie_count(std::size_t i, std::size_t k) const { return ties_[i * d_ + k]; }
  bool has_ties() const noexcept { return has_ties_; }

 private:
  friend UnivariateRankTable univariate_ranks(const ForecastCase& c);

  std::size_t m_;
  std::size_t d_;
  std::vector<int> ranks_;
  std::vector<int> ties_;
  bool has_ties_ = false;
};

UnivariateRankTable univariate_ranks(const ForecastCase& c);

/// Number of elements of S componentwise dominated by x (x itself included).
PreRankVector prerank_multivariate(const ForecastCase& c);

/// Band depth pre-rank with bands spanned by pairs of elements:
/// (1/d) * sum_k #{ pairs {i, j} of S : min(x_ik, x_jk) <= x_k <= max(x_ik, x_jk) }.
/// Dividing by C(m, 2) gives the modified band depth in [0, 1].
PreRankVector prerank_band_depth(const ForecastCase& c);
PreRankVector prerank_band_depth(const UnivariateRankTable& table);

/// Tie-free closed form (1/d) sum_k (m - r)(r - 1) + (m - 1). Throws
/// InvalidInput when any component contains ties.
PreRankVector prerank_band_depth_tie_free(const UnivariateRankTable& table);

/// Mean of the d univariate ranks.
PreRankVector prerank_average(const ForecastCase& c);
PreRankVector prerank_average(const UnivariateRankTable& table);

/// Length of the Euclidean minimum spanning tree of S without the element.
/// With standardize set, each component is first centred by its mean over S
/// and divided by its standard deviation (components with zero spread are
/// only centred). Requires m >= 3.
PreRankVector prerank_mst(const ForecastCase& c, bool standardize = false);

enum class Method { multivariate, band_depth, average, mst };

struct PreRankMethod {
  Method kind = Method::average;
  bool standardize = false;

  friend bool operator==(const PreRankMethod&, const PreRankMethod&) = default;
};

/// Short names used on the command line and in output files: mv, bd, avg, mst.
std::string_view method_name(Method kind);
PreRankMethod parse_method(std::string_view name);
/// Expands "all" to the four methods; otherwise a comma separated list.
std::vector<PreRankMethod> parse_method_list(std::string_view names);
std::vector<PreRankMethod> all_methods();

PreRankVector compute_preranks(const ForecastCase& c, const PreRankMethod& method);

/// Evaluates several methods on one case, sharing the univariate rank table.
std::vector<PreRankVector> compute_preranks(const ForecastCase& c,
                                            const std::vector<PreRankMethod>& methods);

}  // namespace rankcal
