#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pdsrf/forest.hpp"
#include "pdsrf/stream.hpp"

namespace pdsrf {

struct CachedSample {
  LabeledSample sample;
  LeafSignature signature;
  std::vector<bool> correct;  // correct[i]: tree i's argmax equals the label
};

/// Fixed-capacity sliding window of labeled samples annotated with their leaf
/// signature and per-tree correctness against one forest epoch.
///
/// Leaf ids and correctness flags are kept tree-major, one contiguous row of
/// `capacity` slots per tree. Entries are addressed by logical position,
/// 0 = oldest.
class WindowCache {
 public:
  WindowCache(std::size_t capacity, std::size_t numTrees, std::uint64_t forestEpoch = 0);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t num_trees() const { return numTrees_; }
  bool empty() const { return size_ == 0; }
  std::uint64_t epoch() const { return epoch_; }

  const LabeledSample& sample(std::size_t pos) const { return samples_[slot(pos)]; }
  std::uint32_t leaf(std::size_t pos, std::size_t tree) const { return leaves_[tree * capacity_ + slot(pos)]; }
  bool correct(std::size_t pos, std::size_t tree) const { return correct_[tree * capacity_ + slot(pos)] != 0; }
  /// Materialized copy of entry `pos`.
  CachedSample entry(std::size_t pos) const;

  /// Annotates and appends every block sample, evicting oldest-first.
  void push_block(const Block& block, const Forest& forest);
  void push_samples(std::span<const LabeledSample> samples, const Forest& forest);

  /// Re-routes every entry through tree `treeIndex` after a single
  /// replace_tree; all other positions are left untouched.
  void refresh_for_replacement(std::size_t treeIndex, const Forest& forest);

  /// Logical positions of the min(k, size) entries with the highest
  /// proximity to `query`, best first; ties prefer newer entries.
  std::vector<std::size_t> nearest_positions(const LeafSignature& query, std::size_t k) const;
  std::vector<CachedSample> k_nearest(const LeafSignature& query, std::size_t k) const;

  /// Number of trees agreeing with `query` at entry `pos` (proximity * T).
  std::size_t match_count(const LeafSignature& query, std::size_t pos) const;

 private:
  std::size_t slot(std::size_t pos) const { return (head_ + pos) % capacity_; }
  void annotate(std::size_t slotIndex, std::span<const double> features, int label, const Forest& forest);
  void check_query(const LeafSignature& query) const;

  std::size_t capacity_;
  std::size_t numTrees_;
  std::uint64_t epoch_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::vector<LabeledSample> samples_;
  std::vector<std::uint32_t> leaves_;
  std::vector<std::uint8_t> correct_;
};

}  // namespace pdsrf
