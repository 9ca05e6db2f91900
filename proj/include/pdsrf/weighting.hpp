#pragma once

namespace pdsrf {

struct WeightingParams {
  double epsilon = 0.01;
  double alpha = 0.05;

  void validate() const;
};

/// Weight of a base classifier with error rate `error` in [0, 1]:
/// 1 / (error^2 + epsilon).
double classifier_weight(double error, double epsilon);

/// Training weight of a sample `age` blocks old: exp(-alpha * age).
double temporal_weight(double age, double alpha);

}  // namespace pdsrf
