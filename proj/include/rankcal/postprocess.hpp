#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankcal/histogram.hpp"
#include "rankcal/prerank.hpp"
#include "rankcal/random.hpp"

namespace rankcal {

/// One forecast day: the raw ensemble (m_raw x d, row-major, one row per
/// member) and the verifying observation at each of the d lead times.
struct ForecastDay {
  std::int64_t day = 0;
  std::vector<double> raw;
  std::vector<double> observation;
};

class ForecastSeries {
 public:
  ForecastSeries(std::size_t d, std::size_t m_raw);

  /// Appends a day; days must be strictly increasing and shapes consistent.
  void add_day(ForecastDay day);

  std::size_t dim() const noexcept { return d_; }
  std::size_t raw_members() const noexcept { return m_raw_; }
  std::size_t size() const noexcept { return days_.size(); }
  const ForecastDay& day(std::size_t i) const { return days_.at(i); }
  const std::vector<ForecastDay>& days() const noexcept { return days_; }

  double raw_mean(std::size_t i, std::size_t lead) const;

 private:
  std::size_t d_;
  std::size_t m_raw_;
  std::vector<ForecastDay> days_;
};

enum class Strategy { independent, ecc, mvn };

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

struct PostprocessConfig {
  std::size_t window = 50;
  Strategy strategy = Strategy::independent;
  bool inflate = true;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  void validate() const;
};

/// Least-squares fit y = intercept + slope * x for one lead time.
struct LeadFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
  std::size_t n = 0;
  double predictor_mean = 0.0;
  /// Sum of squared deviations of the training predictor.
  double predictor_sxx = 0.0;

  double predict(double x) const { return intercept + slope * x; }
  /// sqrt(1 + 1/n + (x - mean)^2 / Sxx): standard error multiplier of a new
  /// prediction. The last term is dropped when Sxx is zero.
  double inflation(double x) const;
};

/// Ordinary least squares. A predictor with zero spread gives slope 0 and
/// the mean of y as intercept. Needs at least 2 pairs.
LeadFit fit_linear(std::span<const double> x, std::span<const double> y);

struct RegressionFit {
  std::vector<LeadFit> leads;
};

/// Per-lead regression of observation on raw ensemble mean over the
/// `window` days preceding day index `day`. Throws InsufficientHistory.
RegressionFit fit_bias_correction(const ForecastSeries& series, std::size_t day,
                                  const PostprocessConfig& config);

/// Bias-corrected training errors, window x d row-major (oldest day first).
std::vector<double> training_errors(const ForecastSeries& series, std::size_t day,
                                    const RegressionFit& fit, std::size_t window);

/// Error dressing with each training error used exactly once per lead time,
/// in an independent random order per lead time. Returns window x d members.
std::vector<double> error_dressing(const ForecastSeries& series, std::size_t day,
                                   const RegressionFit& fit, const PostprocessConfig& config,
                                   RandomSource& rng);

/// Reorders samples (n x d) so that in every component the j-th smallest
/// sample goes to the member whose template value has rank j. Template ties
/// are ranked by member index.
std::vector<double> ecc_reorder(std::span<const double> templ, std::span<const double> samples,
                                std::size_t n, std::size_t d);

/// Members mu(day) + N(0, C Sigma C) with Sigma the empirical covariance of
/// the training error vectors and C = diag(inflation). window x d members.
std::vector<double> mvn_error_sampling(const ForecastSeries& series, std::size_t day,
                                       const RegressionFit& fit, const PostprocessConfig& config,
                                       RandomSource& rng);

/// Full postprocessed ensemble for one day under config.strategy.
std::vector<double> postprocess_day(const ForecastSeries& series, std::size_t day,
                                    const PostprocessConfig& config);

struct PipelineResult {
  std::size_t verification_days = 0;
  std::size_t members = 0;
  /// One histogram per lead time, m = members + 1.
  std::vector<RankHistogram> univariate;
  /// One histogram per requested multivariate method.
  std::vector<RankHistogram> multivariate;
};

/// Rolling pipeline over every day with a full training window. Throws
/// InsufficientHistory when no day qualifies.
PipelineResult run_pipeline(const ForecastSeries& series, const PostprocessConfig& config,
                            const std::vector<PreRankMethod>& methods);

/// Synthetic stand-in for an archived forecast/observation record.
///
/// Truth at lead k on day t is clim_t,k + a_t,k + e_t,k: a seasonal and
/// diurnal cycle, a predictable anomaly a (AR(1) in lead time, scale 6, sd
/// signal_sd) and an unpredictable error e (AR(1) with scale tau, sd growing
/// by 5% per lead). Raw members are clim + a + bias + spread * e~, with e~
/// an independent AR(1) error of scale tau + tau_offset and the same sd.
struct SyntheticSpec {
  std::size_t days = 873;
  std::size_t d = 12;
  std::size_t members = 50;
  double tau = 3.0;
  double bias = -1.5;
  double spread = 0.6;
  double tau_offset = 0.0;
  double signal_sd = 3.0;
  double noise_sd = 1.0;
  // Amplitude of an annual cycle in the raw bias; the trailing training
  // window lags behind it.
  double bias_cycle = 1.5;
  std::uint64_t seed = 1;
};

/// "default" or comma separated key=value pairs overriding the defaults,
/// e.g. "days=900,bias=-2,spread=0.5".
SyntheticSpec parse_synthetic_spec(std::string_view text);
std::string format_synthetic_spec(const SyntheticSpec& spec);

ForecastSeries synthetic_series(const SyntheticSpec& spec);

}  // namespace rankcal
