#include "pdsrf/forest.hpp"

#include <cstdio>
#include <sstream>

#include "pdsrf/errors.hpp"

namespace pdsrf {

double proximity(const LeafSignature& a, const LeafSignature& b) {
  if (a.epoch != b.epoch) throw StalenessError("proximity between signatures of different forest epochs");
  if (a.leafIds.size() != b.leafIds.size() || a.leafIds.empty())
    throw DomainError("signatures must have equal, non-zero length");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.leafIds.size(); ++i) same += a.leafIds[i] == b.leafIds[i];
  return static_cast<double>(same) / static_cast<double>(a.leafIds.size());
}

std::optional<ClassDistribution> weighted_vote(std::span<const ClassDistribution> distributions,
                                               std::span<const double> weights) {
  if (distributions.empty() || distributions.size() != weights.size())
    throw DomainError("weighted_vote needs one weight per distribution");
  const std::size_t C = distributions.front().probs.size();
  ClassDistribution out{std::vector<double>(C, 0.0)};
  double total = 0;
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    if (weights[i] < 0) throw DomainError("vote weights must be non-negative");
    if (distributions[i].probs.size() != C) throw DomainError("distributions disagree on class count");
    total += weights[i];
    for (std::size_t c = 0; c < C; ++c) out.probs[c] += weights[i] * distributions[i].probs[c];
  }
  if (!(total > 0)) return std::nullopt;
  double mass = 0;
  for (double p : out.probs) mass += p;
  for (double& p : out.probs) p /= mass;
  return out;
}

int argmax_class(std::span<const double> probs) {
  int best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

Forest::Forest(std::vector<Tree> trees, std::size_t numClasses, std::size_t numFeatures)
    : trees_(std::move(trees)), treeEpochs_(trees_.size(), 0), numClasses_(numClasses), numFeatures_(numFeatures) {
  if (trees_.empty()) throw DomainError("a forest needs at least one tree");
  for (const auto& t : trees_) check_tree(t);
}

void Forest::check_tree(const Tree& t) const {
  if (t.num_classes() != numClasses_ || t.num_features() != numFeatures_)
    throw DomainError("tree was built for a different schema");
}

LeafSignature Forest::signature(std::span<const double> features) const {
  LeafSignature sig;
  sig.leafIds.resize(trees_.size());
  sig.epoch = epoch_;
  signature_into(features, sig.leafIds);
  return sig;
}

void Forest::signature_into(std::span<const double> features, std::span<std::uint32_t> out) const {
  if (features.size() != numFeatures_) throw DomainError("feature vector has wrong length");
  for (std::size_t i = 0; i < trees_.size(); ++i) out[i] = trees_[i].predict_leaf(features);
}

std::vector<ClassDistribution> Forest::distributions(const LeafSignature& sig) const {
  if (sig.epoch != epoch_) throw StalenessError("signature predates the current forest");
  std::vector<ClassDistribution> out;
  out.reserve(trees_.size());
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    const auto p = trees_[i].leaf_probs(sig.leafIds[i]);
    out.push_back({std::vector<double>(p.begin(), p.end())});
  }
  return out;
}

ClassDistribution Forest::unweighted_vote(std::span<const double> features) const {
  if (features.size() != numFeatures_) throw DomainError("feature vector has wrong length");
  ClassDistribution out{std::vector<double>(numClasses_, 0.0)};
  for (const auto& t : trees_) {
    const auto p = t.leaf_probs(t.predict_leaf(features));
    for (std::size_t c = 0; c < numClasses_; ++c) out.probs[c] += p[c];
  }
  for (double& p : out.probs) p /= static_cast<double>(trees_.size());
  return out;
}

void Forest::replace_tree(std::size_t index, Tree tree) {
  if (index >= trees_.size()) throw DomainError("tree index out of range");
  check_tree(tree);
  trees_[index] = std::move(tree);
  ++epoch_;
  treeEpochs_[index] = epoch_;
}

std::string Forest::serialize() const {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "forest %zu %zu %zu %llu\n", numClasses_, numFeatures_, trees_.size(),
                static_cast<unsigned long long>(epoch_));
  out += buf;
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "installed %llu\n", static_cast<unsigned long long>(treeEpochs_[i]));
    out += buf;
    out += trees_[i].serialize();
  }
  return out;
}

Forest Forest::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line, tag;
  std::size_t C = 0, D = 0, T = 0, lineNo = 1;
  unsigned long long epoch = 0;
  if (!std::getline(in, line)) throw ParseError("empty forest", 1);
  {
    std::istringstream head(line);
    if (!(head >> tag >> C >> D >> T >> epoch) || tag != "forest" || T == 0) throw ParseError("bad forest header", 1);
  }
  std::vector<Tree> trees;
  std::vector<std::uint64_t> installed;
  for (std::size_t i = 0; i < T; ++i) {
    unsigned long long at = 0;
    if (!std::getline(in, line) || !(std::istringstream(line) >> tag >> at) || tag != "installed")
      throw ParseError("missing tree epoch", lineNo + 1);
    ++lineNo;
    installed.push_back(at);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("missing tree", lineNo + 1);
    ++lineNo;
    std::size_t tc = 0, td = 0, nodes = 0;
    if (!(std::istringstream(header) >> tag >> tc >> td >> nodes)) throw ParseError("bad tree header", lineNo);
    std::string body = header + "\n";
    for (std::size_t n = 0; n < nodes; ++n) {
      if (!std::getline(in, line)) throw ParseError("truncated tree", lineNo + 1);
      ++lineNo;
      body += line;
      body += '\n';
    }
    trees.push_back(Tree::deserialize(body));
  }
  Forest f(std::move(trees), C, D);
  f.epoch_ = epoch;
  f.treeEpochs_ = std::move(installed);
  return f;
}

}  // namespace pdsrf
