#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdsrf/random.hpp"

namespace pdsrf {

struct ClassDistribution {
  std::vector<double> probs;
};

struct GrowthConfig {
  std::size_t numFeatures = 0;
  std::size_t numClasses = 0;
  std::size_t mtry = 1;
  std::size_t minLeafSize = 1;
  std::size_t maxDepth = 0;  // 0: unlimited

  void validate() const;
};

/// round(sqrt(D)), at least 1.
std::size_t default_mtry(std::size_t numFeatures);

/// 1 - sum p_i^2 over normalized weights. Throws DomainError on all-zero input.
double gini_impurity(std::span<const double> classWeights);

/// Samples with feature < threshold go left.
struct SplitCandidate {
  std::size_t featureIndex = 0;
  double threshold = 0.0;
};

/// One training example as the tree builder sees it. `features` must outlive
/// the build call.
struct TrainingRow {
  std::span<const double> features;
  int label = 0;
  double weight = 1.0;
};

/// Column-major copy of the training rows for cache-friendly split scans.
class FeatureMatrix {
 public:
  FeatureMatrix(std::span<const TrainingRow> rows, std::size_t numFeatures);

  double at(std::size_t row, std::size_t feature) const { return data_[feature * numRows_ + row]; }
  std::span<const double> column(std::size_t feature) const {
    return {data_.data() + feature * numRows_, numRows_};
  }
  std::size_t rows() const { return numRows_; }
  std::size_t features() const { return numFeatures_; }

 private:
  std::size_t numRows_;
  std::size_t numFeatures_;
  std::vector<double> data_;
};

/// Draws features uniformly without replacement until `mtry` non-constant
/// ones are found (or all are exhausted) and one uniform threshold in
/// (min, max) per feature. Every returned candidate sends at least one row
/// each way. An empty result means the node must become a leaf.
std::vector<SplitCandidate> propose_splits(const FeatureMatrix& x, std::span<const std::uint32_t> rows,
                                           const GrowthConfig& growth, Rng& rng);

class Tree {
 public:
  struct Node {
    double threshold = 0.0;
    std::int32_t feature = -1;  // -1 marks a leaf
    // Right child index for internal nodes (the left child is the next node
    // in preorder), leaf id for leaves.
    std::uint32_t link = 0;
  };

  Tree() = default;

  std::uint32_t predict_leaf(std::span<const double> features) const {
    std::uint32_t i = 0;
    while (nodes_[i].feature >= 0) {
      const Node& n = nodes_[i];
      i = features[static_cast<std::size_t>(n.feature)] < n.threshold ? i + 1 : n.link;
    }
    return nodes_[i].link;
  }

  ClassDistribution predict_distribution(std::span<const double> features) const;

  std::span<const double> leaf_probs(std::uint32_t leafId) const {
    return {probs_.data() + static_cast<std::size_t>(leafId) * numClasses_, numClasses_};
  }
  std::span<const double> leaf_weights(std::uint32_t leafId) const {
    return {weights_.data() + static_cast<std::size_t>(leafId) * numClasses_, numClasses_};
  }
  /// argmax of the leaf distribution, lowest class on ties.
  int leaf_class(std::uint32_t leafId) const { return leafClass_[leafId]; }

  std::size_t num_leaves() const { return leafClass_.size(); }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_classes() const { return numClasses_; }
  std::size_t num_features() const { return numFeatures_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Preorder, one node per line; exact (hex-float) thresholds and weights.
  std::string serialize() const;
  static Tree deserialize(const std::string& text);

  friend bool operator==(const Tree& a, const Tree& b) { return a.serialize() == b.serialize(); }

 private:
  friend Tree build_tree(std::span<const TrainingRow>, const GrowthConfig&, std::uint64_t);
  friend class TreeBuilder;
  void finalize_leaves();

  std::vector<Node> nodes_;
  std::vector<double> weights_;  // numLeaves x C
  std::vector<double> probs_;    // numLeaves x C
  std::vector<int> leafClass_;
  std::size_t numClasses_ = 0;
  std::size_t numFeatures_ = 0;
  std::uint64_t seed_ = 0;
};

/// Grows an unpruned randomized tree: at each node the candidate from
/// propose_splits with the lowest weighted child Gini wins (first on ties).
/// Growth stops at pure nodes, nodes with fewer than 2*minLeafSize rows,
/// maxDepth, or when no candidate exists. Leaf class weights are the summed
/// row weights per class.
Tree build_tree(std::span<const TrainingRow> rows, const GrowthConfig& growth, std::uint64_t seed);

}  // namespace pdsrf
