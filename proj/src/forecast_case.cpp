#include "rankcal/forecast_case.hpp"

#include <cmath>

#include "rankcal/errors.hpp"

namespace rankcal {

ForecastCase::ForecastCase(std::size_t m, std::size_t d, std::vector<double> values, std::string id)
    : m_(m), d_(d), values_(std::move(values)), id_(std::move(id)) {
  validate();
}

ForecastCase::ForecastCase(const std::vector<std::vector<double>>& members,
                           const std::vector<double>& observation, std::string case_id)
    : m_(members.size() + 1), d_(observation.size()), id_(std::move(case_id)) {
  values_.reserve(m_ * d_);
  for (const auto& member : members) {
    if (member.size() != d_) {
      throw InvalidInput("member dimension " + std::to_string(member.size()) +
                         " differs from observation dimension " + std::to_string(d_));
    }
    values_.insert(values_.end(), member.begin(), member.end());
  }
  values_.insert(values_.end(), observation.begin(), observation.end());
  validate();
}

ForecastCase ForecastCase::from_rows(std::size_t m, std::size_t d, std::vector<double> values,
                                     std::string case_id) {
  if (values.size() != m * d) {
    throw InvalidInput("expected " + std::to_string(m * d) + " values, got " +
                       std::to_string(values.size()));
  }
  return ForecastCase(m, d, std::move(values), std::move(case_id));
}

void ForecastCase::validate() const {
  if (d_ < 1) throw InvalidInput("forecast case needs dimension d >= 1");
  if (m_ < 2) throw InvalidInput("forecast case needs at least one member and an observation");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("forecast case contains a non-finite value");
  }
}

PreRankVector::PreRankVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v >= 0.0)) throw InvalidInput("pre-ranks must be nonnegative");
  }
}

}  // namespace rankcal
