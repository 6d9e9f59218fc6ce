#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "rankcal/errors.hpp"
#include "rankcal/postprocess.hpp"
#include "rankcal/prerank.hpp"

using namespace rankcal;

namespace {

// d = 1, one raw member per day: raw values x, observations y.
ForecastSeries univariate_series(const std::vector<double>& x, const std::vector<double>& y) {
  ForecastSeries s(1, 1);
  for (std::size_t t = 0; t < x.size(); ++t) s.add_day({static_cast<std::int64_t>(t), {x[t]}, {y[t]}});
  return s;
}

const std::map<Strategy, PipelineResult>& default_results() {
  static const auto results = [] {
    const auto series = synthetic_series(SyntheticSpec{});
    std::map<Strategy, PipelineResult> out;
    for (Strategy s : {Strategy::independent, Strategy::ecc, Strategy::mvn}) {
      PostprocessConfig config;
      config.strategy = s;
      config.seed = 5;
      out.emplace(s, run_pipeline(series, config, all_methods()));
    }
    return out;
  }();
  return results;
}

}  // namespace

TEST(FitLinear, ExactLine) {
  const std::vector<double> x = {0, 1, 2}, y = {1, 3, 5};
  const auto f = fit_linear(x, y);
  EXPECT_DOUBLE_EQ(f.intercept, 1.0);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_DOUBLE_EQ(f.predict(3), 7.0);
  EXPECT_NEAR(f.rss, 0.0, 1e-24);
}

TEST(FitLinear, ConstantPredictor) {
  const std::vector<double> x = {4, 4, 4, 4}, y = {1, 2, 3, 6};
  const auto f = fit_linear(x, y);
  EXPECT_EQ(f.slope, 0.0);
  EXPECT_DOUBLE_EQ(f.intercept, 3.0);
  EXPECT_DOUBLE_EQ(f.inflation(4), std::sqrt(1.25));
  EXPECT_THROW(fit_linear(std::vector<double>{1}, std::vector<double>{1}), InvalidInput);
}

TEST(FitBiasCorrection, RecoversShift) {
  RandomSource rng(31, 0);
  std::vector<double> x(60), y(60);
  for (std::size_t t = 0; t < 60; ++t) {
    x[t] = 3 * rng.normal();
    y[t] = x[t] + 2 + rng.normal();
  }
  PostprocessConfig config;
  const auto fit = fit_bias_correction(univariate_series(x, y), 55, config);
  ASSERT_EQ(fit.leads.size(), 1u);
  EXPECT_EQ(fit.leads[0].n, 50u);
  EXPECT_LT(std::abs(fit.leads[0].intercept - 2), 0.5);
  EXPECT_LT(std::abs(fit.leads[0].slope - 1), 0.2);
  EXPECT_THROW(fit_bias_correction(univariate_series(x, y), 49, config), InsufficientHistory);
}

TEST(ErrorDressing, UsesEachErrorOnce) {
  // Residuals (-1, 0, 1) are orthogonal to x = (1, 0, 1): the fit is exactly
  // y = 10 and the training errors are the residuals.
  const auto s = univariate_series({1, 0, 1, 0.5}, {9, 10, 11, 0});
  PostprocessConfig config;
  config.window = 3;
  config.inflate = false;
  const auto fit = fit_bias_correction(s, 3, config);
  RandomSource rng(1, 1);
  auto members = error_dressing(s, 3, fit, config, rng);
  std::sort(members.begin(), members.end());
  ASSERT_EQ(members.size(), 3u);
  EXPECT_NEAR(members[0], 9, 1e-12);
  EXPECT_NEAR(members[1], 10, 1e-12);
  EXPECT_NEAR(members[2], 11, 1e-12);
}

TEST(ErrorDressing, InflationAtTrainingMean) {
  LeadFit f;
  f.n = 50;
  f.predictor_mean = 3;
  f.predictor_sxx = 10;
  EXPECT_DOUBLE_EQ(f.inflation(3), std::sqrt(1 + 1.0 / 50));
  EXPECT_NEAR(f.inflation(3), 1.00995, 1e-5);
  EXPECT_DOUBLE_EQ(f.inflation(5), std::sqrt(1 + 1.0 / 50 + 0.4));
}

TEST(Ecc, HandExampleAndIdentity) {
  const std::vector<double> templ = {3, 1, 2}, samples = {20, 30, 10};
  EXPECT_EQ(ecc_reorder(templ, samples, 3, 1), (std::vector<double>{30, 10, 20}));
  const std::vector<double> ascending = {1, 2, 3};
  EXPECT_EQ(ecc_reorder(ascending, samples, 3, 1), (std::vector<double>{10, 20, 30}));
  EXPECT_THROW(ecc_reorder(templ, ascending, 3, 2), InvalidInput);
}

TEST(Ecc, PreservesMarginalsAndCopiesRankPattern) {
  RandomSource rng(32, 0);
  const std::size_t n = 15, d = 4;
  std::vector<double> templ(n * d), samples(n * d);
  for (auto& v : templ) v = static_cast<double>(rng.uniform_index(6));  // with ties
  for (auto& v : samples) v = rng.normal();
  const auto out = ecc_reorder(templ, samples, n, d);
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> a, b;
    std::vector<std::size_t> rank_t(n), rank_o(n), order(n);
    for (std::size_t j = 0; j < n; ++j) {
      a.push_back(samples[j * d + k]);
      b.push_back(out[j * d + k]);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
    // Template ranks with ties broken by member index equal output ranks.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return templ[x * d + k] < templ[y * d + k]; });
    for (std::size_t r = 0; r < n; ++r) rank_t[order[r]] = r;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return out[x * d + k] < out[y * d + k]; });
    for (std::size_t r = 0; r < n; ++r) rank_o[order[r]] = r;
    EXPECT_EQ(rank_t, rank_o);
  }
}

TEST(Mvn, ZeroErrorsGiveMean) {
  const auto s = univariate_series({0, 1, 2, 3, 4, 5}, {1, 3, 5, 7, 9, 11});
  PostprocessConfig config;
  config.window = 5;
  config.strategy = Strategy::mvn;
  const auto fit = fit_bias_correction(s, 5, config);
  RandomSource rng(2, 2);
  for (double v : mvn_error_sampling(s, 5, fit, config, rng)) EXPECT_NEAR(v, 11, 1e-9);
}

TEST(Mvn, UnivariateSpreadMatchesInflatedErrors) {
  // Errors +-2 around a constant fit: empirical variance 4 * n/(n-1).
  const std::size_t n = 40;
  std::vector<double> x(n + 1, 0.0), y(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = t % 4 < 2 ? 1.0 : -1.0;
    y[t] = (t % 2 == 0 ? 2.0 : -2.0);
  }
  const auto s = univariate_series(x, y);
  PostprocessConfig config;
  config.window = n;
  config.strategy = Strategy::mvn;
  const auto fit = fit_bias_correction(s, n, config);
  const double c = fit.leads[0].inflation(0.0);
  const double expected_var = 4.0 * n / (n - 1) * c * c;
  double sum = 0, sq = 0, count = 0;
  for (std::uint64_t rep = 0; rep < 2000; ++rep) {
    RandomSource rng(3, rep);
    for (double v : mvn_error_sampling(s, n, fit, config, rng)) {
      sum += v;
      sq += v * v;
      count += 1;
    }
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, fit.leads[0].predict(0.0), 0.02);
  EXPECT_NEAR(sq / count - mean * mean, expected_var, 0.02 * expected_var);
}

TEST(Pipeline, NeedsMoreDaysThanWindow) {
  const auto series = synthetic_series(parse_synthetic_spec("days=50,d=2,members=5"));
  PostprocessConfig config;
  EXPECT_THROW(run_pipeline(series, config, all_methods()), InsufficientHistory);
  config.window = 1;
  EXPECT_THROW(run_pipeline(series, config, all_methods()), InvalidParameter);
  config.window = 10;
  config.strategy = Strategy::ecc;
  EXPECT_THROW(run_pipeline(series, config, all_methods()), InvalidParameter);
}

TEST(Pipeline, WorkerCountDoesNotChangeResults) {
  const auto series = synthetic_series(parse_synthetic_spec("days=90,d=3,members=10"));
  PostprocessConfig config;
  config.window = 10;
  config.strategy = Strategy::ecc;
  const auto a = run_pipeline(series, config, all_methods());
  config.workers = 3;
  const auto b = run_pipeline(series, config, all_methods());
  EXPECT_EQ(a.univariate, b.univariate);
  EXPECT_EQ(a.multivariate, b.multivariate);
  EXPECT_EQ(a.verification_days, 80u);
}

TEST(Pipeline, IndependentStrategyShapes) {
  const auto& r = default_results().at(Strategy::independent);
  EXPECT_GE(r.verification_days, 823u);
  const double uniform = static_cast<double>(r.verification_days) / 51;
  const auto& avg = r.multivariate[2];
  EXPECT_GT(avg.count(1), 1.5 * uniform);
  EXPECT_GT(avg.count(51), 1.5 * uniform);
  const auto& bd = r.multivariate[1];
  std::uint64_t bottom = 0, top = 0;
  for (int k = 1; k <= 5; ++k) {
    bottom += bd.count(k);
    top += bd.count(52 - k);
  }
  EXPECT_GT(bottom, top);
}

TEST(Pipeline, DependenceStrategiesImproveEveryMethod) {
  const auto& results = default_results();
  const auto& indep = results.at(Strategy::independent);
  for (Strategy s : {Strategy::ecc, Strategy::mvn}) {
    for (std::size_t q = 0; q < 4; ++q) {
      EXPECT_LT(histogram_summary(results.at(s).multivariate[q]).chi_square,
                histogram_summary(indep.multivariate[q]).chi_square)
          << strategy_name(s) << " method " << q;
    }
  }
}

TEST(Pipeline, UnivariateCalibrationSharedByStrategies) {
  const auto& results = default_results();
  const auto& indep = results.at(Strategy::independent);
  const double days = static_cast<double>(indep.verification_days);
  const double p = 1.0 / 51, se = std::sqrt(days * p * (1 - p));
  for (const auto& [s, r] : results) {
    for (std::size_t k = 0; k < r.univariate.size(); ++k) {
      for (auto c : r.univariate[k].counts()) EXPECT_LE(std::abs(c - days * p), 4 * se);
      const double a = histogram_summary(r.univariate[k]).chi_square;
      const double b = histogram_summary(indep.univariate[k]).chi_square;
      EXPECT_LT(std::max(a, b), 2 * std::min(a, b)) << strategy_name(s) << " lead " << k;
    }
  }
}

TEST(Series, Validation) {
  ForecastSeries s(2, 2);
  EXPECT_THROW(s.add_day({0, {1, 2, 3}, {1, 2}}), InvalidInput);
  EXPECT_THROW(s.add_day({0, {1, 2, 3, 4}, {1}}), InvalidInput);
  s.add_day({0, {1, 2, 3, 4}, {1, 2}});
  EXPECT_DOUBLE_EQ(s.raw_mean(0, 1), 3.0);
  EXPECT_THROW(s.add_day({0, {1, 2, 3, 4}, {1, 2}}), InvalidInput);
  EXPECT_THROW(s.add_day({1, {1, 2, 3, NAN}, {1, 2}}), InvalidInput);
}

TEST(Synthetic, SpecRoundTrip) {
  const auto spec = parse_synthetic_spec("days=100,bias=-2.25,bias_cycle=0.5,seed=9");
  EXPECT_EQ(spec.days, 100u);
  EXPECT_EQ(spec.bias, -2.25);
  EXPECT_EQ(spec.d, 12u);
  const auto again = parse_synthetic_spec(format_synthetic_spec(spec));
  EXPECT_EQ(format_synthetic_spec(again), format_synthetic_spec(spec));
  EXPECT_THROW(parse_synthetic_spec("colour=red"), InvalidParameter);
  EXPECT_THROW(parse_synthetic_spec("days"), InvalidParameter);
  const auto series = synthetic_series(spec);
  EXPECT_EQ(series.size(), 100u);
  EXPECT_EQ(series.raw_members(), 50u);
}
