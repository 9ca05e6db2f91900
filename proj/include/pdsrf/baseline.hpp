#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pdsrf/streaming_forest.hpp"

namespace pdsrf {

/// Proximity-driven streaming random forest.
StreamingForest make_pdsrf(const PdsrfConfig& config, const StreamSchema& schema);

/// Plain random forest with replace-the-loser forgetting: unweighted votes,
/// unweighted ensemble error, ordinary bootstrap on the window.
StreamingForest make_rf_rtl(const PdsrfConfig& config, const StreamSchema& schema);

/// Unweighted mean of the baseline forest's tree distributions.
ClassDistribution rf_rtl_predict(const StreamingForest& model, std::span<const double> features);

/// Predicts the most frequent label seen so far (lowest index on ties,
/// class 0 before any data).
class MajorityClass {
 public:
  explicit MajorityClass(std::size_t numClasses) : counts_(numClasses, 0) {}

  void observe(int label) { ++counts_.at(static_cast<std::size_t>(label)); }
  int predict() const;
  const std::vector<std::size_t>& counts() const { return counts_; }

 private:
  std::vector<std::size_t> counts_;
};

}  // namespace pdsrf
