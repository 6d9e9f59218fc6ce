#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rankcal {

/// One verification instance: m - 1 ensemble members and one observation,
/// each a point in R^d. Points are stored row-major with the observation in
/// the last row, so the full set S is rows 0..m-1.
class ForecastCase {
 public:
  ForecastCase(const std::vector<std::vector<double>>& members,
               const std::vector<double>& observation, std::string case_id = {});

  /// Build from a flat row-major m x d buffer whose last row is the observation.
  static ForecastCase from_rows(std::size_t m, std::size_t d, std::vector<double> values,
                                std::string case_id = {});

  std::size_t size() const noexcept { return m_; }
  std::size_t dim() const noexcept { return d_; }
  std::size_t observation_index() const noexcept { return m_ - 1; }
  const std::string& id() const noexcept { return id_; }

  std::span<const double> point(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  std::span<const double> observation() const { return point(m_ - 1); }
  double value(std::size_t i, std::size_t k) const { return values_[i * d_ + k]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  ForecastCase(std::size_t m, std::size_t d, std::vector<double> values, std::string id);
  void validate() const;

  std::size_t m_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
  std::string id_;
};

/// Pre-rank values, one per element of S, observation last.
class PreRankVector {
 public:
  PreRankVector() = default;
  explicit PreRankVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double observation() const { return values_.back(); }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace rankcal
