#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdsrf/cache.hpp"
#include "pdsrf/config.hpp"
#include "pdsrf/forest.hpp"
#include "pdsrf/stream.hpp"

namespace pdsrf {

enum class VoteRule {
  proximity_weighted,  // per-tree weights from errors on the k proximity-nearest cached samples
  unweighted,          // plain mean of tree distributions
};

enum class TrainingWeighting {
  temporal,  // weighted bootstrap with exp(-alpha * age) sample weights
  uniform,   // ordinary bootstrap
};

/// Selects between the proximity-driven forest and the plain
/// replace-the-loser forest. Both share every other code path.
struct ForgettingPolicy {
  VoteRule vote = VoteRule::proximity_weighted;
  TrainingWeighting training = TrainingWeighting::temporal;

  static ForgettingPolicy proximity_driven() { return {VoteRule::proximity_weighted, TrainingWeighting::temporal}; }
  static ForgettingPolicy replace_the_loser() { return {VoteRule::unweighted, TrainingWeighting::uniform}; }

  friend bool operator==(const ForgettingPolicy&, const ForgettingPolicy&) = default;
};

struct ReplacementStep {
  std::size_t treeIndex = 0;
  double ensembleError = 0.0;       // before this replacement
  std::vector<double> treeErrors;   // per-tree block error before this replacement
};

struct UpdateReport {
  std::size_t blockIndex = 0;
  double errorBefore = 0.0;  // ensemble error on the block after it entered the window
  double errorAfter = 0.0;
  std::vector<ReplacementStep> steps;

  std::vector<std::size_t> replaced() const;
};

/// Random forest over a sliding window with replace-the-loser pruning.
///
/// Lifecycle: initialize() on the first block (train only), then for each
/// further block classify/predict every sample and call update() with it.
/// predict() is read-only and never changes the ensemble; update() is the
/// only writer. Between public calls the cache and forest share one epoch.
class StreamingForest {
 public:
  StreamingForest(PdsrfConfig config, StreamSchema schema, ForgettingPolicy policy);

  /// Grows T trees on bootstrap resamples of `first` and fills the window.
  void initialize(const Block& first);
  bool initialized() const { return forest_.has_value(); }

  ClassDistribution predict(std::span<const double> features) const;
  int classify(std::span<const double> features) const;

  /// Per-tree vote weights predict() would use for a query signature.
  std::vector<double> tree_weights(const LeafSignature& query) const;

  /// Appends the block to the window, then repeatedly replaces the tree with
  /// the highest block error while the ensemble block error exceeds theta, at
  /// most maxReplacementsPerBlock times.
  UpdateReport update(const Block& block);

  const Forest& forest() const;
  const WindowCache& cache() const;
  std::size_t current_block() const { return currentBlock_; }
  const PdsrfConfig& config() const { return config_; }
  const StreamSchema& schema() const { return schema_; }
  const ForgettingPolicy& policy() const { return policy_; }

  /// Text snapshot of config, policy, block counter, forest and window
  /// contents. Deterministic byte-for-byte; restore() resumes exactly.
  std::string snapshot() const;
  static StreamingForest restore(const std::string& text);

 private:
  void require_initialized() const;
  LeafSignature cached_signature(std::size_t pos) const;
  ClassDistribution vote(const LeafSignature& sig) const;
  double ensemble_error_on_newest(std::size_t count) const;
  std::vector<double> tree_errors_on_newest(std::size_t count) const;
  Tree grow_on_window(std::uint64_t seed) const;

  PdsrfConfig config_;
  StreamSchema schema_;
  ForgettingPolicy policy_;
  GrowthConfig growth_;
  std::optional<Forest> forest_;
  std::optional<WindowCache> cache_;
  std::size_t currentBlock_ = 0;
};

}  // namespace pdsrf
