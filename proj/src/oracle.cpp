#include "rankcal/oracle.hpp"

#include <string>

#include "rankcal/errors.hpp"

namespace rankcal::oracle {

namespace {

void check_m(std::int64_t m, std::int64_t lowest) {
  if (m < lowest || m > max_m) {
    throw InvalidParameter("m must lie in " + std::to_string(lowest) + ".." +
                           std::to_string(max_m) + ", got " + std::to_string(m));
  }
}

void check_d(std::int64_t d) {
  if (d < 1) throw InvalidParameter("d must be >= 1, got " + std::to_string(d));
}

double as_double(std::int64_t v) { return static_cast<double>(v); }

}  // namespace

PowerSums faulhaber_power_sums(std::int64_t m) {
  check_m(m, 1);
  PowerSums s;
  s.s1 = m * (m + 1) / 2;
  s.s2 = m * (m + 1) * (2 * m + 1) / 6;
  s.s3 = s.s1 * s.s1;
  s.s4 = m * (m + 1) * (2 * m + 1) * (3 * m * m + 3 * m - 1) / 30;
  return s;
}

ExpectedPreranks expected_preranks(std::int64_t m) {
  check_m(m, 2);
  return {as_double(m + 1) / 2.0, as_double(m * m + 3 * m - 4) / 6.0};
}

double rank_covariance(std::int64_t m) {
  check_m(m, 2);
  return as_double((m - 1) * (m - 1)) / 12.0;
}

PrerankVariances prerank_variances(std::int64_t m, std::int64_t d) {
  check_m(m, 2);
  check_d(d);
  PrerankVariances v;
  const double dd = as_double(d);
  v.avg_member = as_double(m * m - 1) / (12.0 * dd);
  v.avg_obs = v.avg_member + as_double((m - 1) * (m - 1)) * as_double(d - 1) / (12.0 * dd);
  v.bd_member = as_double((m + 1) * (m - 1) * (7 * m * m + 8 * m + 12)) / (60.0 * dd);
  const std::int64_t quartic = m * m * m * m - 6 * m * m * m + 13 * m * m - 12 * m + 4;
  v.bd_obs = v.bd_member + as_double(quartic) * as_double(d - 1) / (180.0 * dd);
  return v;
}

MixedRankMoments mixed_rank_moments(std::int64_t m) {
  check_m(m, 2);
  MixedRankMoments e;
  e.e_r_r = as_double(m) + as_double((m - 1) * (m - 1)) / 3.0;
  e.e_r_r2 = as_double(3 * m * m * m + 4 * m * m + 3 * m + 2) / 12.0;
  e.e_r2_r2 = as_double(6 * m * m * m * m + 9 * m * m * m + 8 * m * m + 3 * m + 4) / 30.0;
  return e;
}

double band_depth_component_covariance(std::int64_t m) {
  const auto e = mixed_rank_moments(m);
  const auto s = faulhaber_power_sums(m);
  const double mean_r = as_double(s.s1) / as_double(m);
  const double mean_r2 = as_double(s.s2) / as_double(m);
  const double a = as_double(m + 1);
  const double cov_r_r = e.e_r_r - mean_r * mean_r;
  const double cov_r_r2 = e.e_r_r2 - mean_r * mean_r2;
  const double cov_r2_r2 = e.e_r2_r2 - mean_r2 * mean_r2;
  return a * a * cov_r_r - 2.0 * a * cov_r_r2 + cov_r2_r2;
}

PrerankVariances band_depth_variances_exact(std::int64_t m, std::int64_t d) {
  check_m(m, 2);
  check_d(d);
  // Per component q(r) = (m + 1) r - r^2 with r uniform on 1..m.
  const auto s = faulhaber_power_sums(m);
  const double mm = as_double(m);
  const double a = as_double(m + 1);
  const double mean_q = (a * as_double(s.s1) - as_double(s.s2)) / mm;
  const double mean_q2 =
      (a * a * as_double(s.s2) - 2.0 * a * as_double(s.s3) + as_double(s.s4)) / mm;
  const double var_q = mean_q2 - mean_q * mean_q;
  const double dd = as_double(d);
  PrerankVariances v = prerank_variances(m, d);
  v.bd_member = var_q / dd;
  v.bd_obs = v.bd_member + band_depth_component_covariance(m) * as_double(d - 1) / dd;
  return v;
}

OracleReport report(std::int64_t m, std::int64_t d) {
  const auto e = expected_preranks(m);
  const auto v = prerank_variances(m, d);
  const auto exact = band_depth_variances_exact(m, d);
  OracleReport r;
  r.m = m;
  r.d = d;
  r.expected_prerank_avg = e.avg;
  r.expected_prerank_bd = e.bd;
  r.var_avg_member = v.avg_member;
  r.var_avg_obs = v.avg_obs;
  r.var_bd_member = v.bd_member;
  r.var_bd_obs = v.bd_obs;
  r.rank_covariance = rank_covariance(m);
  r.var_bd_member_exact = exact.bd_member;
  r.var_bd_obs_exact = exact.bd_obs;
  return r;
}

}  // namespace rankcal::oracle
