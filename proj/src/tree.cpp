#include "pdsrf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "pdsrf/errors.hpp"

namespace pdsrf {

void GrowthConfig::validate() const {
  if (numFeatures < 1) throw ConfigError("growth config needs numFeatures >= 1");
  if (numClasses < 2) throw ConfigError("growth config needs numClasses >= 2");
  if (mtry < 1 || mtry > numFeatures) throw ConfigError("mtry must lie in [1, numFeatures]");
  if (minLeafSize < 1) throw ConfigError("minLeafSize must be >= 1");
}

std::size_t default_mtry(std::size_t numFeatures) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(numFeatures)))));
}

double gini_impurity(std::span<const double> classWeights) {
  double total = 0;
  for (double w : classWeights) {
    if (w < 0) throw DomainError("class weights must be non-negative");
    total += w;
  }
  if (!(total > 0)) throw DomainError("gini impurity of an empty node");
  double sumSq = 0;
  for (double w : classWeights) {
    const double p = w / total;
    sumSq += p * p;
  }
  return 1.0 - sumSq;
}

FeatureMatrix::FeatureMatrix(std::span<const TrainingRow> rows, std::size_t numFeatures)
    : numRows_(rows.size()), numFeatures_(numFeatures), data_(rows.size() * numFeatures) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].features.size() != numFeatures) throw DomainError("training row has wrong attribute count");
    for (std::size_t f = 0; f < numFeatures; ++f) data_[f * numRows_ + r] = rows[r].features[f];
  }
}

std::vector<SplitCandidate> propose_splits(const FeatureMatrix& x, std::span<const std::uint32_t> rows,
                                           const GrowthConfig& growth, Rng& rng) {
  std::vector<SplitCandidate> out;
  if (rows.size() < 2) return out;
  out.reserve(growth.mtry);

  std::vector<std::size_t> order(x.features());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t drawn = 0; drawn < order.size() && out.size() < growth.mtry; ++drawn) {
    std::uniform_int_distribution<std::size_t> pick(drawn, order.size() - 1);
    std::swap(order[drawn], order[pick(rng)]);
    const std::size_t f = order[drawn];

    const auto col = x.column(f);
    double lo = col[rows[0]], hi = lo;
    for (std::uint32_t r : rows) {
      const double v = col[r];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) continue;

    std::uniform_real_distribution<double> between(lo, hi);
    double t = between(rng);
    for (int attempt = 0; !(t > lo && t < hi) && attempt < 8; ++attempt) t = between(rng);
    // Only reachable when lo and hi are adjacent doubles.
    if (!(t > lo && t < hi)) t = hi;
    out.push_back({f, t});
  }
  return out;
}

namespace {

struct Work {
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
  std::int64_t parent;  // -1 for the root; set for right children only
};

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(std::span<const TrainingRow> rows, const GrowthConfig& growth, std::uint64_t seed)
      : rows_(rows), growth_(growth), x_(rows, growth.numFeatures), rng_(seed) {
    labels_.reserve(rows.size());
    weights_.reserve(rows.size());
    for (const auto& r : rows) {
      if (r.label < 0 || static_cast<std::size_t>(r.label) >= growth.numClasses)
        throw DomainError("training label out of range");
      if (!(r.weight > 0)) throw DomainError("training weights must be positive");
      labels_.push_back(r.label);
      weights_.push_back(r.weight);
    }
    index_.resize(rows.size());
    std::iota(index_.begin(), index_.end(), std::uint32_t{0});
  }

  Tree build(std::uint64_t seed) {
    Tree tree;
    tree.numClasses_ = growth_.numClasses;
    tree.numFeatures_ = growth_.numFeatures;
    tree.seed_ = seed;

    const std::size_t C = growth_.numClasses;
    std::vector<double> nodeW(C), leftW(C), rightW(C);
    std::vector<Work> stack{{0, index_.size(), 0, -1}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      const auto self = static_cast<std::uint32_t>(tree.nodes_.size());
      if (w.parent >= 0) tree.nodes_[static_cast<std::size_t>(w.parent)].link = self;
      tree.nodes_.emplace_back();

      std::fill(nodeW.begin(), nodeW.end(), 0.0);
      for (std::size_t i = w.begin; i < w.end; ++i) nodeW[labels_[index_[i]]] += weights_[index_[i]];
      const std::size_t n = w.end - w.begin;
      const auto nonEmpty = std::count_if(nodeW.begin(), nodeW.end(), [](double v) { return v > 0; });

      bool leaf = nonEmpty <= 1 || n < 2 * growth_.minLeafSize ||
                  (growth_.maxDepth > 0 && w.depth >= growth_.maxDepth);
      SplitCandidate best{};
      if (!leaf) {
        const std::span<const std::uint32_t> nodeRows(index_.data() + w.begin, n);
        const auto candidates = propose_splits(x_, nodeRows, growth_, rng_);
        double bestScore = std::numeric_limits<double>::infinity();
        bool found = false;
        for (const auto& c : candidates) {
          std::fill(leftW.begin(), leftW.end(), 0.0);
          std::fill(rightW.begin(), rightW.end(), 0.0);
          std::size_t nLeft = 0;
          const auto col = x_.column(c.featureIndex);
          for (std::uint32_t r : nodeRows) {
            if (col[r] < c.threshold) {
              leftW[labels_[r]] += weights_[r];
              ++nLeft;
            } else {
              rightW[labels_[r]] += weights_[r];
            }
          }
          if (nLeft < growth_.minLeafSize || n - nLeft < growth_.minLeafSize) continue;
          const double wl = std::accumulate(leftW.begin(), leftW.end(), 0.0);
          const double wr = std::accumulate(rightW.begin(), rightW.end(), 0.0);
          const double score = (wl * gini_impurity(leftW) + wr * gini_impurity(rightW)) / (wl + wr);
          if (score < bestScore) {
            bestScore = score;
            best = c;
            found = true;
          }
        }
        leaf = !found;
      }

      if (leaf) {
        auto& node = tree.nodes_.back();
        node.feature = -1;
        node.link = static_cast<std::uint32_t>(tree.leafClass_.size());
        tree.weights_.insert(tree.weights_.end(), nodeW.begin(), nodeW.end());
        tree.leafClass_.push_back(0);
        continue;
      }

      auto& node = tree.nodes_.back();
      node.feature = static_cast<std::int32_t>(best.featureIndex);
      node.threshold = best.threshold;
      const auto col = x_.column(best.featureIndex);
      auto mid = std::partition(index_.begin() + static_cast<std::ptrdiff_t>(w.begin),
                                index_.begin() + static_cast<std::ptrdiff_t>(w.end),
                                [&](std::uint32_t r) { return col[r] < best.threshold; });
      const auto split = static_cast<std::size_t>(mid - index_.begin());
      stack.push_back({split, w.end, w.depth + 1, static_cast<std::int64_t>(self)});
      stack.push_back({w.begin, split, w.depth + 1, -1});
    }
    tree.finalize_leaves();
    return tree;
  }

 private:
  std::span<const TrainingRow> rows_;
  GrowthConfig growth_;
  FeatureMatrix x_;
  Rng rng_;
  std::vector<int> labels_;
  std::vector<double> weights_;
  std::vector<std::uint32_t> index_;
};

Tree build_tree(std::span<const TrainingRow> rows, const GrowthConfig& growth, std::uint64_t seed) {
  growth.validate();
  if (rows.empty()) throw DomainError("cannot build a tree from no samples");
  TreeBuilder builder(rows, growth, seed);
  return builder.build(seed);
}

void Tree::finalize_leaves() {
  const std::size_t leaves = weights_.size() / numClasses_;
  probs_.assign(weights_.size(), 0.0);
  leafClass_.assign(leaves, 0);
  for (std::size_t l = 0; l < leaves; ++l) {
    const double* w = weights_.data() + l * numClasses_;
    double total = 0;
    for (std::size_t c = 0; c < numClasses_; ++c) total += w[c];
    int arg = 0;
    for (std::size_t c = 0; c < numClasses_; ++c) {
      probs_[l * numClasses_ + c] = w[c] / total;
      if (w[c] > w[arg]) arg = static_cast<int>(c);
    }
    leafClass_[l] = arg;
  }
}

ClassDistribution Tree::predict_distribution(std::span<const double> features) const {
  const auto p = leaf_probs(predict_leaf(features));
  return {std::vector<double>(p.begin(), p.end())};
}

std::size_t Tree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[i].feature >= 0) {
      stack.push_back({i + 1, d + 1});
      stack.push_back({nodes_[i].link, d + 1});
    }
  }
  return best;
}

std::string Tree::serialize() const {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "tree %zu %zu %zu %llu\n", numClasses_, numFeatures_, nodes_.size(),
                static_cast<unsigned long long>(seed_));
  out += buf;
  for (const auto& n : nodes_) {
    if (n.feature >= 0) {
      std::snprintf(buf, sizeof buf, "S %d %a\n", n.feature, n.threshold);
      out += buf;
    } else {
      std::snprintf(buf, sizeof buf, "L %u", n.link);
      out += buf;
      for (double w : leaf_weights(n.link)) {
        std::snprintf(buf, sizeof buf, " %a", w);
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

Tree Tree::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  std::size_t nodeCount = 0;
  unsigned long long seed = 0;
  Tree t;
  if (!(in >> tag >> t.numClasses_ >> t.numFeatures_ >> nodeCount >> seed) || tag != "tree")
    throw ParseError("bad tree header", 1);
  if (t.numClasses_ < 1 || nodeCount < 1) throw ParseError("bad tree header", 1);
  t.seed_ = seed;
  std::size_t leaves = 0;
  for (std::size_t i = 0; i < nodeCount; ++i) {
    std::string word;
    if (!(in >> tag)) throw ParseError("truncated tree", i + 2);
    Node n;
    if (tag == "S") {
      if (!(in >> n.feature >> word) || n.feature < 0 || static_cast<std::size_t>(n.feature) >= t.numFeatures_)
        throw ParseError("bad split node", i + 2);
      n.threshold = std::strtod(word.c_str(), nullptr);
    } else if (tag == "L") {
      if (!(in >> n.link) || n.link != leaves) throw ParseError("leaf ids must be dense in preorder", i + 2);
      ++leaves;
      for (std::size_t c = 0; c < t.numClasses_; ++c) {
        if (!(in >> word)) throw ParseError("truncated leaf", i + 2);
        t.weights_.push_back(std::strtod(word.c_str(), nullptr));
      }
    } else {
      throw ParseError("unknown node tag '" + tag + "'", i + 2);
    }
    t.nodes_.push_back(n);
  }
  // A node that follows a leaf in preorder is the right child of the
  // innermost split still waiting for one.
  std::vector<std::uint32_t> pending;
  for (std::uint32_t i = 0; i < t.nodes_.size(); ++i) {
    if (i > 0 && t.nodes_[i - 1].feature < 0) {
      if (pending.empty()) throw ParseError("trailing nodes after a complete tree", i + 2);
      t.nodes_[pending.back()].link = i;
      pending.pop_back();
    }
    if (t.nodes_[i].feature >= 0) pending.push_back(i);
  }
  if (!pending.empty()) throw ParseError("tree is missing subtrees", nodeCount + 1);
  t.finalize_leaves();
  return t;
}

}  // namespace pdsrf
