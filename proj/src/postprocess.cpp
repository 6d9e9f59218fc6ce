#include "rankcal/postprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "rankcal/covariance.hpp"
#include "rankcal/errors.hpp"
#include "rankcal/forecast_case.hpp"
#include "rankcal/parallel.hpp"
#include "rankcal/ranking.hpp"

namespace rankcal {

ForecastSeries::ForecastSeries(std::size_t d, std::size_t m_raw) : d_(d), m_raw_(m_raw) {
  if (d < 1) throw InvalidInput("series needs at least one lead time");
  if (m_raw < 1) throw InvalidInput("series needs at least one raw member");
}

void ForecastSeries::add_day(ForecastDay day) {
  if (day.observation.size() != d_) {
    throw InvalidInput("day " + std::to_string(day.day) + ": observation has " +
                       std::to_string(day.observation.size()) + " lead times, expected " +
                       std::to_string(d_));
  }
  if (day.raw.size() != m_raw_ * d_) {
    throw InvalidInput("day " + std::to_string(day.day) + ": raw ensemble has wrong shape");
  }
  if (!days_.empty() && day.day <= days_.back().day) {
    throw InvalidInput("days must be strictly increasing (day " + std::to_string(day.day) +
                       " after " + std::to_string(days_.back().day) + ")");
  }
  for (double v : day.raw) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite raw forecast value");
  }
  for (double v : day.observation) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite observation value");
  }
  days_.push_back(std::move(day));
}

double ForecastSeries::raw_mean(std::size_t i, std::size_t lead) const {
  const auto& raw = days_.at(i).raw;
  double s = 0.0;
  for (std::size_t j = 0; j < m_raw_; ++j) s += raw[j * d_ + lead];
  return s / static_cast<double>(m_raw_);
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::independent: return "independent";
    case Strategy::ecc: return "ecc";
    case Strategy::mvn: return "mvn";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "independent") return Strategy::independent;
  if (name == "ecc") return Strategy::ecc;
  if (name == "mvn") return Strategy::mvn;
  throw InvalidParameter("unknown strategy '" + std::string(name) + "'");
}

void PostprocessConfig::validate() const {
  if (window < 2) throw InvalidParameter("training window must be >= 2 days");
}

double LeadFit::inflation(double x) const {
  double v = 1.0 + 1.0 / static_cast<double>(n);
  if (predictor_sxx > 0.0) v += (x - predictor_mean) * (x - predictor_mean) / predictor_sxx;
  return std::sqrt(v);
}

LeadFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("regression inputs differ in length");
  if (x.size() < 2) throw InvalidInput("regression needs at least 2 pairs");
  const double n = static_cast<double>(x.size());
  LeadFit f;
  f.n = x.size();
  f.predictor_mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - f.predictor_mean;
    f.predictor_sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  f.slope = f.predictor_sxx > 0.0 ? sxy / f.predictor_sxx : 0.0;
  f.intercept = y_mean - f.slope * f.predictor_mean;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.predict(x[i]);
    f.rss += r * r;
  }
  return f;
}

RegressionFit fit_bias_correction(const ForecastSeries& series, std::size_t day,
                                  const PostprocessConfig& config) {
  config.validate();
  if (day >= series.size()) throw InvalidInput("day index out of range");
  if (day < config.window) throw InsufficientHistory(config.window, day);
  const std::size_t d = series.dim();
  std::vector<double> x(config.window), y(config.window);
  RegressionFit fit;
  fit.leads.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = 0; j < config.window; ++j) {
      const std::size_t t = day - config.window + j;
      x[j] = series.raw_mean(t, k);
      y[j] = series.day(t).observation[k];
    }
    fit.leads.push_back(fit_linear(x, y));
  }
  return fit;
}

std::vector<double> training_errors(const ForecastSeries& series, std::size_t day,
                                    const RegressionFit& fit, std::size_t window) {
  if (day < window) throw InsufficientHistory(window, day);
  const std::size_t d = series.dim();
  if (fit.leads.size() != d) throw InvalidInput("fit does not cover every lead time");
  std::vector<double> errors(window * d);
  for (std::size_t j = 0; j < window; ++j) {
    const std::size_t t = day - window + j;
    for (std::size_t k = 0; k < d; ++k) {
      errors[j * d + k] = series.day(t).observation[k] - fit.leads[k].predict(series.raw_mean(t, k));
    }
  }
  return errors;
}

std::vector<double> error_dressing(const ForecastSeries& series, std::size_t day,
                                   const RegressionFit& fit, const PostprocessConfig& config,
                                   RandomSource& rng) {
  const std::size_t n = config.window;
  const std::size_t d = series.dim();
  const auto errors = training_errors(series, day, fit, n);
  std::vector<double> members(n * d);
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < d; ++k) {
    const double x = series.raw_mean(day, k);
    const double mu = fit.leads[k].predict(x);
    const double c = config.inflate ? fit.leads[k].inflation(x) : 1.0;
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_index(i))]);
    }
    for (std::size_t j = 0; j < n; ++j) members[j * d + k] = mu + c * errors[order[j] * d + k];
  }
  return members;
}

std::vector<double> ecc_reorder(std::span<const double> templ, std::span<const double> samples,
                                std::size_t n, std::size_t d) {
  if (templ.size() != n * d || samples.size() != n * d) {
    throw InvalidInput("ECC template and samples must both be " + std::to_string(n) + " x " +
                       std::to_string(d));
  }
  std::vector<double> out(n * d);
  std::vector<std::size_t> order(n);
  std::vector<double> sorted(n);
  for (std::size_t k = 0; k < d; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return templ[a * d + k] < templ[b * d + k];
    });
    for (std::size_t j = 0; j < n; ++j) sorted[j] = samples[j * d + k];
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < n; ++j) out[order[j] * d + k] = sorted[j];
  }
  return out;
}

std::vector<double> mvn_error_sampling(const ForecastSeries& series, std::size_t day,
                                       const RegressionFit& fit, const PostprocessConfig& config,
                                       RandomSource& rng) {
  const std::size_t n = config.window;
  const std::size_t d = series.dim();
  const auto errors = training_errors(series, day, fit, n);
  const auto di = static_cast<Eigen::Index>(d);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> e(
      errors.data(), static_cast<Eigen::Index>(n), di);
  const Eigen::RowVectorXd mean = e.colwise().mean();
  const Eigen::MatrixXd centered = e.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::VectorXd mu(di);
  for (std::size_t k = 0; k < d; ++k) {
    const double x = series.raw_mean(day, k);
    mu[static_cast<Eigen::Index>(k)] = fit.leads[k].predict(x);
    if (config.inflate) {
      const double c = fit.leads[k].inflation(x);
      cov.row(static_cast<Eigen::Index>(k)) *= c;
      cov.col(static_cast<Eigen::Index>(k)) *= c;
    }
  }

  std::vector<double> members(n * d);
  if (cov.isZero(0.0)) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < d; ++k) members[j * d + k] = mu[static_cast<Eigen::Index>(k)];
    }
    return members;
  }
  const GaussianSampler sampler(mu, cholesky_with_jitter(cov));
  for (std::size_t j = 0; j < n; ++j) sampler.draw(rng, std::span<double>(members).subspan(j * d, d));
  return members;
}

namespace {

RandomSource dressing_stream(std::uint64_t seed, std::size_t day, Strategy s) {
  return RandomSource(seed, day).substream(stream::dressing + static_cast<std::uint64_t>(s));
}

}  // namespace

std::vector<double> postprocess_day(const ForecastSeries& series, std::size_t day,
                                    const PostprocessConfig& config) {
  const auto fit = fit_bias_correction(series, day, config);
  RandomSource rng = dressing_stream(config.seed, day, config.strategy);
  switch (config.strategy) {
    case Strategy::independent: return error_dressing(series, day, fit, config, rng);
    case Strategy::ecc: {
      if (series.raw_members() != config.window) {
        throw InvalidParameter("ECC needs the training window (" + std::to_string(config.window) +
                               ") to equal the raw ensemble size (" +
                               std::to_string(series.raw_members()) + ")");
      }
      const auto dressed = error_dressing(series, day, fit, config, rng);
      return ecc_reorder(series.day(day).raw, dressed, config.window, series.dim());
    }
    case Strategy::mvn: return mvn_error_sampling(series, day, fit, config, rng);
  }
  throw InvalidParameter("unknown strategy");
}

PipelineResult run_pipeline(const ForecastSeries& series, const PostprocessConfig& config,
                            const std::vector<PreRankMethod>& methods) {
  config.validate();
  if (series.size() <= config.window) {
    throw InsufficientHistory(config.window + 1, series.size());
  }
  const std::size_t d = series.dim();
  const std::size_t n = config.window;
  const std::size_t first = config.window;
  const std::size_t count = series.size() - first;

  struct DayRanks {
    std::vector<int> univariate;
    std::vector<int> multivariate;
  };
  std::vector<DayRanks> per_day(count);
  parallel_for(count, config.workers, [&](std::size_t idx) {
    const std::size_t day = first + idx;
    const auto members = postprocess_day(series, day, config);
    const auto& obs = series.day(day).observation;
    const RandomSource base(config.seed, day);
    auto& out = per_day[idx];
    out.univariate.resize(d);
    std::vector<double> column(n + 1);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t j = 0; j < n; ++j) column[j] = members[j * d + k];
      column[n] = obs[k];
      const auto c = ForecastCase::from_rows(n + 1, 1, column);
      RandomSource rng = base.substream(stream::ties + 0x100 + k);
      out.univariate[k] = rank_of_observation(c, prerank_average(c), rng);
    }
    std::vector<double> all(members);
    all.insert(all.end(), obs.begin(), obs.end());
    const auto c = ForecastCase::from_rows(n + 1, d, std::move(all), std::to_string(series.day(day).day));
    const auto preranks = compute_preranks(c, methods);
    out.multivariate.resize(methods.size());
    for (std::size_t q = 0; q < methods.size(); ++q) {
      RandomSource rng = base.substream(stream::ties + 2 * static_cast<std::uint64_t>(methods[q].kind) +
                                        (methods[q].standardize ? 1 : 0));
      out.multivariate[q] = rank_of_observation(c, preranks[q], rng);
    }
  });

  PipelineResult result;
  result.verification_days = count;
  result.members = n;
  result.univariate.assign(d, RankHistogram(n + 1));
  result.multivariate.assign(methods.size(), RankHistogram(n + 1));
  for (const auto& r : per_day) {
    for (std::size_t k = 0; k < d; ++k) result.univariate[k].add(r.univariate[k]);
    for (std::size_t q = 0; q < methods.size(); ++q) result.multivariate[q].add(r.multivariate[q]);
  }
  return result;
}

namespace {

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw InvalidParameter("bad value '" + std::string(text) + "' for synthetic key '" +
                           std::string(key) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidParameter("bad integer '" + std::string(text) + "' for synthetic key '" +
                           std::string(key) + "'");
  }
  return v;
}

}  // namespace

SyntheticSpec parse_synthetic_spec(std::string_view text) {
  SyntheticSpec spec;
  if (text.empty() || text == "default") return spec;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == text.npos ? text.npos : comma - start);
    const auto eq = item.find('=');
    if (eq == item.npos) throw InvalidParameter("synthetic spec item '" + std::string(item) + "' lacks '='");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "days") spec.days = parse_count(key, value);
    else if (key == "d") spec.d = parse_count(key, value);
    else if (key == "members") spec.members = parse_count(key, value);
    else if (key == "tau") spec.tau = parse_double(key, value);
    else if (key == "bias") spec.bias = parse_double(key, value);
    else if (key == "spread") spec.spread = parse_double(key, value);
    else if (key == "tau_offset") spec.tau_offset = parse_double(key, value);
    else if (key == "signal_sd") spec.signal_sd = parse_double(key, value);
    else if (key == "noise_sd") spec.noise_sd = parse_double(key, value);
    else if (key == "bias_cycle") spec.bias_cycle = parse_double(key, value);
    else if (key == "seed") spec.seed = parse_count(key, value);
    else throw InvalidParameter("unknown synthetic spec key '" + std::string(key) + "'");
    if (comma == text.npos) break;
    start = comma + 1;
  }
  return spec;
}

std::string format_synthetic_spec(const SyntheticSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "days=" << s.days << ",d=" << s.d << ",members=" << s.members << ",tau=" << s.tau
     << ",bias=" << s.bias << ",spread=" << s.spread << ",tau_offset=" << s.tau_offset
     << ",signal_sd=" << s.signal_sd << ",noise_sd=" << s.noise_sd << ",bias_cycle=" << s.bias_cycle << ",seed=" << s.seed;
  return os.str();
}

ForecastSeries synthetic_series(const SyntheticSpec& spec) {
  if (spec.d < 1 || spec.members < 1 || spec.days < 1) {
    throw InvalidParameter("synthetic series needs days, d and members >= 1");
  }
  if (!(spec.spread > 0.0) || !(spec.noise_sd > 0.0) || !(spec.signal_sd >= 0.0) ||
      !std::isfinite(spec.bias_cycle)) {
    throw InvalidParameter("synthetic spread and noise_sd must be positive");
  }
  const std::size_t d = spec.d;
  const GaussianSampler anomaly(CovarianceModel::ar1(d, 6.0), std::vector<double>(d, 0.0));
  const GaussianSampler truth_error(CovarianceModel::ar1(d, spec.tau), std::vector<double>(d, 0.0));
  const GaussianSampler member_error(CovarianceModel::ar1(d, spec.tau + spec.tau_offset),
                                     std::vector<double>(d, 0.0));
  std::vector<double> sd(d);
  for (std::size_t k = 0; k < d; ++k) sd[k] = spec.noise_sd * (1.0 + 0.05 * static_cast<double>(k));

  ForecastSeries series(d, spec.members);
  std::vector<double> a(d), e(d);
  for (std::size_t t = 0; t < spec.days; ++t) {
    RandomSource rng = RandomSource(spec.seed, t).substream(stream::sampling);
    const double season = 5.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 365.25);
    std::vector<double> signal(d);
    anomaly.draw(rng, a);
    for (std::size_t k = 0; k < d; ++k) {
      // Leads are 6 h apart.
      const double diurnal = 3.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k + 1) / 4.0);
      signal[k] = season + diurnal + spec.signal_sd * a[k];
    }
    ForecastDay day;
    day.day = static_cast<std::int64_t>(t);
    day.observation.resize(d);
    truth_error.draw(rng, e);
    for (std::size_t k = 0; k < d; ++k) day.observation[k] = signal[k] + sd[k] * e[k];
    const double bias = spec.bias + spec.bias_cycle * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / 365.25);
    day.raw.resize(spec.members * d);
    for (std::size_t j = 0; j < spec.members; ++j) {
      member_error.draw(rng, e);
      for (std::size_t k = 0; k < d; ++k) {
        day.raw[j * d + k] = signal[k] + bias + spec.spread * sd[k] * e[k];
      }
    }
    series.add_day(std::move(day));
  }
  return series;
}

}  // namespace rankcal
