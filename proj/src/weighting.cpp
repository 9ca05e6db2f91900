#include "pdsrf/weighting.hpp"

#include <cmath>

#include "pdsrf/errors.hpp"

namespace pdsrf {

void WeightingParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
}

double classifier_weight(double error, double epsilon) {
  if (!(error >= 0.0 && error <= 1.0)) throw DomainError("error rate must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  return 1.0 / (error * error + epsilon);
}

double temporal_weight(double age, double alpha) {
  if (!(age >= 0.0)) throw DomainError("sample age must be non-negative");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be non-negative");
  return std::exp(-alpha * age);
}

}  // namespace pdsrf
