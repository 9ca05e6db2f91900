#include "pdsrf/baseline.hpp"

namespace pdsrf {

StreamingForest make_pdsrf(const PdsrfConfig& config, const StreamSchema& schema) {
  return StreamingForest(config, schema, ForgettingPolicy::proximity_driven());
}

StreamingForest make_rf_rtl(const PdsrfConfig& config, const StreamSchema& schema) {
  return StreamingForest(config, schema, ForgettingPolicy::replace_the_loser());
}

ClassDistribution rf_rtl_predict(const StreamingForest& model, std::span<const double> features) {
  return model.forest().unweighted_vote(features);
}

int MajorityClass::predict() const {
  int best = 0;
  for (std::size_t c = 1; c < counts_.size(); ++c)
    if (counts_[c] > counts_[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

}  // namespace pdsrf
