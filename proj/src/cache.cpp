#include "pdsrf/cache.hpp"

#include <algorithm>

#include "pdsrf/errors.hpp"

namespace pdsrf {

WindowCache::WindowCache(std::size_t capacity, std::size_t numTrees, std::uint64_t forestEpoch)
    : capacity_(capacity),
      numTrees_(numTrees),
      epoch_(forestEpoch),
      samples_(capacity),
      leaves_(capacity * numTrees),
      correct_(capacity * numTrees) {
  if (capacity < 1) throw ConfigError("window capacity must be at least 1");
  if (numTrees < 1 || numTrees > 65535) throw ConfigError("tree count must lie in [1, 65535]");
}

CachedSample WindowCache::entry(std::size_t pos) const {
  if (pos >= size_) throw DomainError("cache position out of range");
  CachedSample e;
  e.sample = sample(pos);
  e.signature.epoch = epoch_;
  e.signature.leafIds.resize(numTrees_);
  e.correct.resize(numTrees_);
  for (std::size_t t = 0; t < numTrees_; ++t) {
    e.signature.leafIds[t] = leaf(pos, t);
    e.correct[t] = correct(pos, t);
  }
  return e;
}

void WindowCache::annotate(std::size_t s, std::span<const double> features, int label, const Forest& forest) {
  for (std::size_t t = 0; t < numTrees_; ++t) {
    const Tree& tree = forest.tree(t);
    const std::uint32_t l = tree.predict_leaf(features);
    leaves_[t * capacity_ + s] = l;
    correct_[t * capacity_ + s] = tree.leaf_class(l) == label;
  }
}

void WindowCache::push_block(const Block& block, const Forest& forest) { push_samples(block.samples, forest); }

void WindowCache::push_samples(std::span<const LabeledSample> samples, const Forest& forest) {
  if (forest.epoch() != epoch_) throw StalenessError("cache epoch differs from forest epoch; refresh first");
  if (forest.size() != numTrees_) throw DomainError("forest size differs from cache tree count");
  for (const auto& s : samples) {
    if (s.features.size() != forest.num_features()) throw DomainError("sample has wrong attribute count");
    std::size_t target;
    if (size_ < capacity_) {
      target = slot(size_);
      ++size_;
    } else {
      target = head_;
      head_ = (head_ + 1) % capacity_;
    }
    samples_[target] = s;
    annotate(target, s.features, s.label, forest);
  }
}

void WindowCache::refresh_for_replacement(std::size_t treeIndex, const Forest& forest) {
  if (treeIndex >= numTrees_) throw DomainError("tree index out of range");
  if (forest.epoch() != epoch_ + 1 || forest.tree_epoch(treeIndex) != forest.epoch())
    throw StalenessError("forest diverged from the cache by more than the named replacement");
  const Tree& tree = forest.tree(treeIndex);
  std::uint32_t* leafRow = leaves_.data() + treeIndex * capacity_;
  std::uint8_t* okRow = correct_.data() + treeIndex * capacity_;
  for (std::size_t pos = 0; pos < size_; ++pos) {
    const std::size_t s = slot(pos);
    const std::uint32_t l = tree.predict_leaf(samples_[s].features);
    leafRow[s] = l;
    okRow[s] = tree.leaf_class(l) == samples_[s].label;
  }
  epoch_ = forest.epoch();
}

void WindowCache::check_query(const LeafSignature& query) const {
  if (query.epoch != epoch_) throw StalenessError("query signature predates the cache epoch");
  if (query.leafIds.size() != numTrees_) throw DomainError("query signature has wrong length");
}

std::size_t WindowCache::match_count(const LeafSignature& query, std::size_t pos) const {
  check_query(query);
  std::size_t same = 0;
  for (std::size_t t = 0; t < numTrees_; ++t) same += leaf(pos, t) == query.leafIds[t];
  return same;
}

std::vector<std::size_t> WindowCache::nearest_positions(const LeafSignature& query, std::size_t k) const {
  check_query(query);
  if (k < 1) throw DomainError("k must be at least 1");
  std::vector<std::size_t> out;
  if (size_ == 0) return out;

  // Until the ring first fills, head_ is 0 and slots [0, size_) are live.
  std::vector<std::uint16_t> counts(size_, 0);
  for (std::size_t t = 0; t < numTrees_; ++t) {
    const std::uint32_t q = query.leafIds[t];
    const std::uint32_t* row = leaves_.data() + t * capacity_;
    for (std::size_t s = 0; s < size_; ++s) counts[s] = static_cast<std::uint16_t>(counts[s] + (row[s] == q));
  }

  // Smallest match count that still has to contribute entries.
  const std::size_t want = std::min(k, size_);
  std::vector<std::size_t> hist(numTrees_ + 1, 0);
  for (std::uint16_t c : counts) ++hist[c];
  std::size_t cut = numTrees_, above = 0;
  while (above + hist[cut] < want) above += hist[cut--];

  out.reserve(want);
  std::size_t atCutTaken = 0;
  for (std::size_t pos = size_; pos-- > 0;) {
    const std::uint16_t c = counts[slot(pos)];
    if (c > cut || (c == cut && atCutTaken < want - above)) {
      out.push_back(pos);
      if (c == cut) ++atCutTaken;
    }
  }
  // Newest-first scan order already breaks ties; stable sort keeps it.
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return counts[slot(a)] > counts[slot(b)]; });
  return out;
}

std::vector<CachedSample> WindowCache::k_nearest(const LeafSignature& query, std::size_t k) const {
  std::vector<CachedSample> out;
  for (std::size_t pos : nearest_positions(query, k)) out.push_back(entry(pos));
  return out;
}

}  // namespace pdsrf
