#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdsrf/tree.hpp"

namespace pdsrf {

/// Leaf reached in each tree, stamped with the forest epoch it was computed at.
struct LeafSignature {
  std::vector<std::uint32_t> leafIds;
  std::uint64_t epoch = 0;
};

/// Fraction of trees in which both signatures share a leaf. Throws
/// StalenessError if the epochs differ.
double proximity(const LeafSignature& a, const LeafSignature& b);

/// Sum of w_i * dist_i, normalized. Returns nullopt when every weight is zero
/// (callers fall back to uniform weights).
std::optional<ClassDistribution> weighted_vote(std::span<const ClassDistribution> distributions,
                                               std::span<const double> weights);

/// argmax with ties toward the lowest class index.
int argmax_class(std::span<const double> probs);

class Forest {
 public:
  Forest(std::vector<Tree> trees, std::size_t numClasses, std::size_t numFeatures);

  std::size_t size() const { return trees_.size(); }
  std::size_t num_classes() const { return numClasses_; }
  std::size_t num_features() const { return numFeatures_; }
  const Tree& tree(std::size_t i) const { return trees_.at(i); }
  const std::vector<Tree>& trees() const { return trees_; }

  /// Incremented by every replace_tree.
  std::uint64_t epoch() const { return epoch_; }
  /// Epoch at which tree i was last installed.
  std::uint64_t tree_epoch(std::size_t i) const { return treeEpochs_.at(i); }

  LeafSignature signature(std::span<const double> features) const;
  void signature_into(std::span<const double> features, std::span<std::uint32_t> out) const;

  /// Per-tree distributions of the leaves named by a signature.
  std::vector<ClassDistribution> distributions(const LeafSignature& sig) const;

  ClassDistribution unweighted_vote(std::span<const double> features) const;

  void replace_tree(std::size_t index, Tree tree);

  /// Epoch header followed by each serialized tree.
  std::string serialize() const;
  static Forest deserialize(const std::string& text);

 private:
  void check_tree(const Tree& t) const;

  std::vector<Tree> trees_;
  std::vector<std::uint64_t> treeEpochs_;
  std::size_t numClasses_;
  std::size_t numFeatures_;
  std::uint64_t epoch_ = 0;
};

}  // namespace pdsrf
