#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rankcal/covariance.hpp"
#include "rankcal/errors.hpp"

using namespace rankcal;

TEST(Covariance, LagExamples) {
  EXPECT_NEAR(CovarianceModel::ar1(10, 3).at_lag(3), 0.36787944117144233, 1e-15);
  EXPECT_EQ(CovarianceModel::truncated_linear(10).at_lag(5), 0.0);
  EXPECT_EQ(CovarianceModel::truncated_linear(10).at_lag(0), 1.0);
  EXPECT_EQ(CovarianceModel::truncated_linear(10).at_lag(7), 0.0);
  EXPECT_NEAR(CovarianceModel::damped_cosine(10).at_lag(2), std::exp(-2 / 4.5) * 0.5, 1e-15);
  EXPECT_NEAR(CovarianceModel::damped_cosine(10).at_lag(2), 0.32054, 1e-4);
  EXPECT_DOUBLE_EQ(CovarianceModel::long_range(10).at_lag(5), 1.0 / 3.0);
}

TEST(Covariance, InvalidParameters) {
  EXPECT_THROW(CovarianceModel::ar1(5, 0.0), InvalidParameter);
  EXPECT_THROW(CovarianceModel::ar1(5, -1.0), InvalidParameter);
  EXPECT_THROW(CovarianceModel::identity(5, 0.0), InvalidParameter);
  EXPECT_THROW(CovarianceModel::identity(0, 1.0), InvalidParameter);
}

TEST(Covariance, MatricesAreSymmetricWithExpectedDiagonal) {
  for (const auto& model : {CovarianceModel::ar1(15, 2), CovarianceModel::damped_cosine(15),
                            CovarianceModel::long_range(15), CovarianceModel::truncated_linear(15),
                            CovarianceModel::identity(15, 2.0)}) {
    const auto c = covariance_matrix(model);
    const double diag = model.kind == CovarianceModel::Kind::identity_scaled ? 4.0 : 1.0;
    for (int i = 0; i < 15; ++i) {
      EXPECT_EQ(c(i, i), diag);
      for (int j = 0; j < 15; ++j) EXPECT_EQ(c(i, j), c(j, i));
    }
    const auto l = cholesky_with_jitter(c);
    EXPECT_LT((l * l.transpose() - c).cwiseAbs().maxCoeff(), 1e-9) << describe(model);
  }
}

TEST(Covariance, JitterAndFailure) {
  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
  EXPECT_NO_THROW(cholesky_with_jitter(singular));
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  EXPECT_THROW(cholesky_with_jitter(indefinite), NotPositiveDefinite);
}

TEST(GaussianSampler, ConsumesDNormalsAndMatchesMoments) {
  const auto model = CovarianceModel::ar1(4, 3);
  const GaussianSampler s(model, {1, 2, 3, 4});
  RandomSource a(5, 0), b(5, 0);
  std::vector<double> x(4);
  s.draw(a, x);
  for (int i = 0; i < 4; ++i) b.normal();
  EXPECT_EQ(a.next_u64(), b.next_u64());

  const int n = 40000;
  std::vector<double> mean(4, 0.0), lag1(3, 0.0);
  std::vector<double> sq(4, 0.0);
  for (int t = 0; t < n; ++t) {
    s.draw(a, x);
    for (int k = 0; k < 4; ++k) {
      mean[k] += x[k];
      sq[k] += (x[k] - k - 1) * (x[k] - k - 1);
    }
    for (int k = 0; k < 3; ++k) lag1[k] += (x[k] - k - 1) * (x[k + 1] - k - 2);
  }
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(mean[k] / n, k + 1.0, 3 / std::sqrt(n));
    EXPECT_NEAR(sq[k] / n, 1.0, 0.03);
  }
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(lag1[k] / n, std::exp(-1.0 / 3), 0.02);
}

TEST(GaussianSampler, FullyDependentComponentsAreIdentical) {
  const GaussianSampler s(CovarianceModel::fully_dependent(5), std::vector<double>(5, 0.0));
  RandomSource r(6, 0);
  std::vector<double> x(5);
  for (int t = 0; t < 10; ++t) {
    s.draw(r, x);
    for (int k = 1; k < 5; ++k) EXPECT_EQ(x[k], x[0]);
  }
}
