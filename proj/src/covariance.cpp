#include "rankcal/covariance.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rankcal/errors.hpp"

namespace rankcal {

namespace {

void require_dim(std::size_t d) {
  if (d < 1) throw InvalidParameter("covariance model needs d >= 1");
}

}  // namespace

CovarianceModel CovarianceModel::identity(std::size_t d, double sigma) {
  require_dim(d);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameter("standard deviation must be positive");
  }
  return {Kind::identity_scaled, d, sigma};
}

CovarianceModel CovarianceModel::ar1(std::size_t d, double tau) {
  require_dim(d);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("AR(1) scale tau must be > 0");
  return {Kind::ar1_exponential, d, tau};
}

CovarianceModel CovarianceModel::damped_cosine(std::size_t d) {
  require_dim(d);
  return {Kind::damped_cosine, d, 0.0};
}

CovarianceModel CovarianceModel::long_range(std::size_t d) {
  require_dim(d);
  return {Kind::long_range, d, 0.0};
}

CovarianceModel CovarianceModel::truncated_linear(std::size_t d) {
  require_dim(d);
  return {Kind::truncated_linear, d, 0.0};
}

CovarianceModel CovarianceModel::fully_dependent(std::size_t d) {
  require_dim(d);
  return {Kind::fully_dependent, d, 0.0};
}

double CovarianceModel::at_lag(std::size_t lag) const {
  const double h = static_cast<double>(lag);
  switch (kind) {
    case Kind::identity_scaled: return lag == 0 ? parameter * parameter : 0.0;
    case Kind::ar1_exponential:
      if (!(parameter > 0.0)) throw InvalidParameter("AR(1) scale tau must be > 0");
      return std::exp(-h / parameter);
    case Kind::damped_cosine:
      return std::exp(-h / 4.5) * (0.75 + 0.25 * std::cos(std::numbers::pi * h / 2.0));
    case Kind::long_range: return 1.0 / (1.0 + h / 2.5);
    case Kind::truncated_linear: return lag <= 5 ? 1.0 - h / 5.0 : 0.0;
    case Kind::fully_dependent: return 1.0;
  }
  return 0.0;
}

std::string describe(const CovarianceModel& model) {
  std::ostringstream os;
  switch (model.kind) {
    case CovarianceModel::Kind::identity_scaled: os << "identity(sigma=" << model.parameter << ")"; break;
    case CovarianceModel::Kind::ar1_exponential: os << "ar1(tau=" << model.parameter << ")"; break;
    case CovarianceModel::Kind::damped_cosine: os << "damped-cosine"; break;
    case CovarianceModel::Kind::long_range: os << "long-range"; break;
    case CovarianceModel::Kind::truncated_linear: os << "truncated-linear"; break;
    case CovarianceModel::Kind::fully_dependent: os << "fully-dependent"; break;
  }
  os << ", d=" << model.d;
  return os.str();
}

Eigen::MatrixXd covariance_matrix(const CovarianceModel& model) {
  require_dim(model.d);
  const auto d = static_cast<Eigen::Index>(model.d);
  Eigen::MatrixXd cov(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      cov(i, j) = model.at_lag(static_cast<std::size_t>(std::abs(i - j)));
    }
  }
  return cov;
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const Eigen::MatrixXd nudged =
      cov + 1e-10 * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  llt.compute(nudged);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  throw NotPositiveDefinite("covariance matrix is not positive definite (after 1e-10 jitter)");
}

GaussianSampler::GaussianSampler(Eigen::VectorXd mean, Eigen::MatrixXd factor)
    : mean_(std::move(mean)), factor_(std::move(factor)) {
  if (factor_.rows() != mean_.size() || factor_.cols() != mean_.size()) {
    throw InvalidInput("sampler factor and mean dimensions disagree");
  }
  diagonal_ = factor_.isDiagonal(0.0);
}

GaussianSampler::GaussianSampler(const CovarianceModel& model, std::vector<double> mean) {
  if (mean.size() != model.d) throw InvalidInput("mean vector length differs from model dimension");
  mean_ = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  const auto d = static_cast<Eigen::Index>(model.d);
  if (model.kind == CovarianceModel::Kind::fully_dependent) {
    // Rank-one: a single normal copied into every component.
    factor_ = Eigen::MatrixXd::Zero(d, d);
    factor_.col(0).setOnes();
  } else {
    factor_ = cholesky_with_jitter(covariance_matrix(model));
  }
  diagonal_ = factor_.isDiagonal(0.0);
}

void GaussianSampler::draw(RandomSource& rng, std::span<double> out) const {
  const auto d = mean_.size();
  if (static_cast<Eigen::Index>(out.size()) != d) throw InvalidInput("output span has wrong length");
  double z_small[64];
  std::vector<double> z_large;
  double* z = z_small;
  if (d > 64) {
    z_large.resize(static_cast<std::size_t>(d));
    z = z_large.data();
  }
  for (Eigen::Index k = 0; k < d; ++k) z[k] = rng.normal();
  if (diagonal_) {
    for (Eigen::Index k = 0; k < d; ++k) out[k] = mean_[k] + factor_(k, k) * z[k];
    return;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    double acc = mean_[i];
    for (Eigen::Index k = 0; k <= i; ++k) acc += factor_(i, k) * z[k];
    out[static_cast<std::size_t>(i)] = acc;
  }
}

}  // namespace rankcal
