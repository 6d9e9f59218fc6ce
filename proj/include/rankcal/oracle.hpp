#pragma once

#include <cstdint>

namespace rankcal::oracle {

/// Largest m accepted; keeps every intermediate power sum inside int64.
inline constexpr std::int64_t max_m = 1000;

/// Closed-form pre-rank moments for the extreme dependence regime: forecast
/// components independent, observation components identical, curves
/// mutually independent.
struct OracleReport {
  std::int64_t m = 0;
  std::int64_t d = 0;
  double expected_prerank_avg = 0.0;
  double expected_prerank_bd = 0.0;
  double var_avg_member = 0.0;
  double var_avg_obs = 0.0;
  double var_bd_member = 0.0;
  double var_bd_obs = 0.0;
  double rank_covariance = 0.0;
  /// Band depth variances recomputed from the power sums; see
  /// band_depth_variances_exact().
  double var_bd_member_exact = 0.0;
  double var_bd_obs_exact = 0.0;
};

struct ExpectedPreranks {
  double avg = 0.0;
  double bd = 0.0;
};

/// E(avg) = (m + 1)/2 and E(bd) = (m^2 + 3m - 4)/6 for exchangeable elements.
ExpectedPreranks expected_preranks(std::int64_t m);

struct PrerankVariances {
  double avg_member = 0.0;
  double avg_obs = 0.0;
  double bd_member = 0.0;
  double bd_obs = 0.0;
};

/// Published closed forms:
///   avg_member ~ (m^2 - 1)/(12 d)
///   avg_obs    = avg_member + (m - 1)^2 (d - 1)/(12 d)
///   bd_member  ~ (m + 1)(m - 1)(7 m^2 + 8 m + 12)/(60 d)
///   bd_obs     = bd_member + (m^4 - 6 m^3 + 13 m^2 - 12 m + 4)(d - 1)/(180 d)
/// The band depth member term does not match Var((m + 1) r - r^2)/d for r
/// uniform on 1..m; band_depth_variances_exact() gives that value.
PrerankVariances prerank_variances(std::int64_t m, std::int64_t d);

/// Var of the band depth pre-rank from the exact per-component variance
/// (m^2 - 1)(m^2 - 4)/180 (via power sums) plus the observation's
/// cross-component covariance term derived from the mixed rank moments.
PrerankVariances band_depth_variances_exact(std::int64_t m, std::int64_t d);

/// Cov(rank(X_mk), rank(X_mk')) = (m - 1)^2 / 12 for k != k'.
double rank_covariance(std::int64_t m);

/// Mixed moments of the observation's ranks in two distinct components.
struct MixedRankMoments {
  double e_r_r = 0.0;    ///< E(r r')    = m + (m - 1)^2 / 3
  double e_r_r2 = 0.0;   ///< E(r r'^2)  = (3m^3 + 4m^2 + 3m + 2)/12
  double e_r2_r2 = 0.0;  ///< E(r^2 r'^2) = (6m^4 + 9m^3 + 8m^2 + 3m + 4)/30
};

MixedRankMoments mixed_rank_moments(std::int64_t m);

/// Cov(q(r), q(r')) with q(r) = (m + 1) r - r^2, assembled from the mixed
/// moments. Equals (m^4 - 6m^3 + 13m^2 - 12m + 4)/180.
double band_depth_component_covariance(std::int64_t m);

struct PowerSums {
  std::int64_t s1 = 0;
  std::int64_t s2 = 0;
  std::int64_t s3 = 0;
  std::int64_t s4 = 0;
};

/// sum_{i=1}^m i^p for p = 1..4 by Faulhaber's formulas. 1 <= m <= max_m.
PowerSums faulhaber_power_sums(std::int64_t m);

OracleReport report(std::int64_t m, std::int64_t d);

}  // namespace rankcal::oracle
