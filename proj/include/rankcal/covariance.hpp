#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankcal/random.hpp"

namespace rankcal {

/// Covariance structure of a d-dimensional Gaussian vector indexed by time
/// steps 1..d. All kinds except identity_scaled are correlation functions of
/// the lag h = |i - j|.
struct CovarianceModel {
  enum class Kind {
    identity_scaled,   ///< sigma^2 I
    ar1_exponential,   ///< exp(-h / tau)
    damped_cosine,     ///< exp(-h / 4.5) (0.75 + 0.25 cos(pi h / 2))
    long_range,        ///< 1 / (1 + h / 2.5)
    truncated_linear,  ///< max(0, 1 - h / 5)
    fully_dependent,   ///< all ones: every component identical
  };

  Kind kind = Kind::identity_scaled;
  std::size_t d = 1;
  /// sigma for identity_scaled, tau for ar1_exponential, unused otherwise.
  double parameter = 1.0;

  static CovarianceModel identity(std::size_t d, double sigma = 1.0);
  static CovarianceModel ar1(std::size_t d, double tau);
  static CovarianceModel damped_cosine(std::size_t d);
  static CovarianceModel long_range(std::size_t d);
  static CovarianceModel truncated_linear(std::size_t d);
  static CovarianceModel fully_dependent(std::size_t d);

  /// Correlation (or covariance for identity_scaled) at lag h.
  double at_lag(std::size_t h) const;
};

std::string describe(const CovarianceModel& model);

Eigen::MatrixXd covariance_matrix(const CovarianceModel& model);

/// Lower-triangular L with L L^T = cov. On failure retries once with
/// 1e-10 I added to the diagonal, then throws NotPositiveDefinite.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov);

/// Draws from N(mean, L L^T). Each draw consumes exactly d standard normals
/// from the supplied stream, in component order.
class GaussianSampler {
 public:
  GaussianSampler(Eigen::VectorXd mean, Eigen::MatrixXd factor);
  GaussianSampler(const CovarianceModel& model, std::vector<double> mean);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  void draw(RandomSource& rng, std::span<double> out) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
  bool diagonal_ = false;
};

}  // namespace rankcal
