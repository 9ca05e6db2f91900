#include "pdsrf/streaming_forest.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "pdsrf/errors.hpp"
#include "pdsrf/random.hpp"
#include "pdsrf/weighting.hpp"

namespace pdsrf {

namespace {

// Seed streams: (block, iteration, purpose). Iteration 0 is initialization.
constexpr std::uint64_t kBootstrapStream = 0xB0;
constexpr std::uint64_t kGrowStream = 0x7E;

std::vector<TrainingRow> rows_from_counts(const std::vector<const LabeledSample*>& samples,
                                          const std::vector<std::uint32_t>& counts,
                                          const std::vector<double>& unitWeights) {
  std::vector<TrainingRow> rows;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (counts[i] == 0) continue;
    rows.push_back({samples[i]->features, samples[i]->label, counts[i] * unitWeights[i]});
  }
  return rows;
}

const char* to_string(VoteRule v) { return v == VoteRule::unweighted ? "unweighted" : "proximity_weighted"; }
const char* to_string(TrainingWeighting t) { return t == TrainingWeighting::uniform ? "uniform" : "temporal"; }

}  // namespace

std::vector<std::size_t> UpdateReport::replaced() const {
  std::vector<std::size_t> out;
  for (const auto& s : steps) out.push_back(s.treeIndex);
  return out;
}

StreamingForest::StreamingForest(PdsrfConfig config, StreamSchema schema, ForgettingPolicy policy)
    : config_(config), schema_(schema), policy_(policy) {
  schema_.validate();
  config_.validate();
  growth_ = config_.growth(schema_);
}

void StreamingForest::require_initialized() const {
  if (!forest_) throw ConfigError("classifier used before initialize()");
}

const Forest& StreamingForest::forest() const {
  require_initialized();
  return *forest_;
}

const WindowCache& StreamingForest::cache() const {
  require_initialized();
  return *cache_;
}

void StreamingForest::initialize(const Block& first) {
  if (first.samples.size() < 2) throw ConfigError("first block must hold at least two samples");
  std::vector<const LabeledSample*> samples;
  for (const auto& s : first.samples) samples.push_back(&s);
  const std::vector<double> unit(samples.size(), 1.0);

  std::vector<Tree> trees(config_.numTrees);
  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(config_.seed, {first.index, 0, t, kBootstrapStream}));
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<std::uint32_t> counts(samples.size(), 0);
    for (std::size_t d = 0; d < samples.size(); ++d) ++counts[pick(rng)];
    const auto rows = rows_from_counts(samples, counts, unit);
    trees[t] = build_tree(rows, growth_, derive_seed(config_.seed, {first.index, 0, t, kGrowStream}));
  };

  const std::size_t workers = std::min(config_.workers, config_.numTrees);
  if (workers <= 1) {
    for (std::size_t t = 0; t < config_.numTrees; ++t) grow(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < config_.numTrees; t += workers) grow(t);
      });
  }

  forest_.emplace(std::move(trees), schema_.numClasses, schema_.numFeatures);
  cache_.emplace(config_.windowSize, config_.numTrees, forest_->epoch());
  cache_->push_block(first, *forest_);
  currentBlock_ = first.index + 1;
}

LeafSignature StreamingForest::cached_signature(std::size_t pos) const {
  LeafSignature sig;
  sig.epoch = cache_->epoch();
  sig.leafIds.resize(config_.numTrees);
  for (std::size_t t = 0; t < config_.numTrees; ++t) sig.leafIds[t] = cache_->leaf(pos, t);
  return sig;
}

std::vector<double> StreamingForest::tree_weights(const LeafSignature& query) const {
  require_initialized();
  std::vector<double> w(config_.numTrees, 1.0);
  if (policy_.vote == VoteRule::unweighted) return w;
  const auto nearest = cache_->nearest_positions(query, config_.k);
  if (nearest.empty()) return w;
  const double m = static_cast<double>(nearest.size());
  for (std::size_t t = 0; t < config_.numTrees; ++t) {
    std::size_t wrong = 0;
    for (std::size_t pos : nearest) wrong += !cache_->correct(pos, t);
    w[t] = classifier_weight(static_cast<double>(wrong) / m, config_.epsilon);
  }
  return w;
}

ClassDistribution StreamingForest::vote(const LeafSignature& sig) const {
  const std::size_t C = schema_.numClasses;
  ClassDistribution out{std::vector<double>(C, 0.0)};
  const auto weights = tree_weights(sig);
  double mass = 0;
  for (std::size_t t = 0; t < config_.numTrees; ++t) {
    const auto p = forest_->tree(t).leaf_probs(sig.leafIds[t]);
    for (std::size_t c = 0; c < C; ++c) out.probs[c] += weights[t] * p[c];
  }
  for (double p : out.probs) mass += p;
  for (double& p : out.probs) p /= mass;
  return out;
}

ClassDistribution StreamingForest::predict(std::span<const double> features) const {
  require_initialized();
  return vote(forest_->signature(features));
}

int StreamingForest::classify(std::span<const double> features) const { return argmax_class(predict(features).probs); }

double StreamingForest::ensemble_error_on_newest(std::size_t count) const {
  std::size_t wrong = 0;
  for (std::size_t pos = cache_->size() - count; pos < cache_->size(); ++pos)
    wrong += argmax_class(vote(cached_signature(pos)).probs) != cache_->sample(pos).label;
  return static_cast<double>(wrong) / static_cast<double>(count);
}

std::vector<double> StreamingForest::tree_errors_on_newest(std::size_t count) const {
  std::vector<double> errors(config_.numTrees, 0.0);
  for (std::size_t t = 0; t < config_.numTrees; ++t) {
    std::size_t wrong = 0;
    for (std::size_t pos = cache_->size() - count; pos < cache_->size(); ++pos) wrong += !cache_->correct(pos, t);
    errors[t] = static_cast<double>(wrong) / static_cast<double>(count);
  }
  return errors;
}

Tree StreamingForest::grow_on_window(std::uint64_t seed) const {
  const std::size_t n = cache_->size();
  std::vector<const LabeledSample*> samples(n);
  std::vector<double> unit(n, 1.0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    samples[pos] = &cache_->sample(pos);
    if (policy_.training == TrainingWeighting::temporal) {
      const auto age = static_cast<double>(static_cast<std::int64_t>(currentBlock_) - samples[pos]->arrivalBlock);
      unit[pos] = temporal_weight(std::max(0.0, age), config_.alpha);
    }
  }

  Rng rng(derive_seed(seed, {kBootstrapStream}));
  std::vector<std::uint32_t> counts(n, 0);
  if (policy_.training == TrainingWeighting::temporal) {
    std::discrete_distribution<std::size_t> pick(unit.begin(), unit.end());
    for (std::size_t d = 0; d < n; ++d) ++counts[pick(rng)];
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t d = 0; d < n; ++d) ++counts[pick(rng)];
  }
  const auto rows = rows_from_counts(samples, counts, unit);
  return build_tree(rows, growth_, derive_seed(seed, {kGrowStream}));
}

UpdateReport StreamingForest::update(const Block& block) {
  require_initialized();
  UpdateReport report;
  report.blockIndex = block.index;
  if (block.samples.empty()) return report;

  currentBlock_ = block.index;
  cache_->push_block(block, *forest_);
  const std::size_t fresh = std::min(block.samples.size(), cache_->size());

  double err = ensemble_error_on_newest(fresh);
  report.errorBefore = err;
  for (std::size_t iter = 0; iter < config_.maxReplacementsPerBlock && err > config_.theta; ++iter) {
    ReplacementStep step;
    step.ensembleError = err;
    step.treeErrors = tree_errors_on_newest(fresh);
    step.treeIndex = static_cast<std::size_t>(
        std::max_element(step.treeErrors.begin(), step.treeErrors.end()) - step.treeErrors.begin());

    forest_->replace_tree(step.treeIndex, grow_on_window(derive_seed(config_.seed, {block.index, iter + 1})));
    cache_->refresh_for_replacement(step.treeIndex, *forest_);
    report.steps.push_back(std::move(step));
    err = ensemble_error_on_newest(fresh);
  }
  report.errorAfter = err;
  currentBlock_ = block.index + 1;
  return report;
}

// ---------------------------------------------------------------------------
// Snapshot

std::string StreamingForest::snapshot() const {
  require_initialized();
  std::string out = "pdsrf-snapshot 1\n";
  char buf[128];
  out += std::string("policy ") + to_string(policy_.vote) + " " + to_string(policy_.training) + "\n";
  std::snprintf(buf, sizeof buf, "schema %zu %zu %d %d\n", schema_.numFeatures, schema_.numClasses,
                schema_.labelColumn, schema_.labelBase);
  out += buf;
  std::snprintf(buf, sizeof buf, "current-block %zu\n", currentBlock_);
  out += buf;
  const auto entries = config_entries(config_);
  std::snprintf(buf, sizeof buf, "config %zu\n", entries.size());
  out += buf;
  for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
  out += forest_->serialize();
  std::snprintf(buf, sizeof buf, "window %zu\n", cache_->size());
  out += buf;
  for (std::size_t pos = 0; pos < cache_->size(); ++pos) {
    const auto& s = cache_->sample(pos);
    std::snprintf(buf, sizeof buf, "%llu %lld %d", static_cast<unsigned long long>(s.id),
                  static_cast<long long>(s.arrivalBlock), s.label);
    out += buf;
    for (double v : s.features) {
      std::snprintf(buf, sizeof buf, " %a", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

StreamingForest StreamingForest::restore(const std::string& text) {
  std::istringstream in(text);
  std::string line, tag, a, b;
  std::size_t lineNo = 0;
  auto next = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError("truncated snapshot", lineNo + 1);
    ++lineNo;
    return std::istringstream(line);
  };

  if (next().str() != "pdsrf-snapshot 1") throw ParseError("not a snapshot", 1);
  ForgettingPolicy policy;
  if (!(next() >> tag >> a >> b) || tag != "policy") throw ParseError("bad policy line", lineNo);
  policy.vote = a == "unweighted" ? VoteRule::unweighted : VoteRule::proximity_weighted;
  policy.training = b == "uniform" ? TrainingWeighting::uniform : TrainingWeighting::temporal;

  StreamSchema schema;
  if (!(next() >> tag >> schema.numFeatures >> schema.numClasses >> schema.labelColumn >> schema.labelBase) ||
      tag != "schema")
    throw ParseError("bad schema line", lineNo);
  std::size_t currentBlock = 0, configLines = 0;
  if (!(next() >> tag >> currentBlock) || tag != "current-block") throw ParseError("bad block line", lineNo);
  if (!(next() >> tag >> configLines) || tag != "config") throw ParseError("bad config line", lineNo);
  std::string configText;
  for (std::size_t i = 0; i < configLines; ++i) configText += next().str() + "\n";
  const PdsrfConfig config = parse_config_text(configText);

  StreamingForest sf(config, schema, policy);
  std::string forestText = next().str() + "\n";
  {
    std::istringstream head(forestText);
    std::size_t C = 0, D = 0, T = 0;
    head >> tag >> C >> D >> T;
    for (std::size_t t = 0; t < T; ++t) {
      forestText += next().str() + "\n";  // installed
      std::string treeHead = next().str();
      forestText += treeHead + "\n";
      std::size_t tc = 0, td = 0, nodes = 0;
      std::istringstream(treeHead) >> tag >> tc >> td >> nodes;
      for (std::size_t n = 0; n < nodes; ++n) forestText += next().str() + "\n";
    }
  }
  sf.forest_.emplace(Forest::deserialize(forestText));
  if (sf.forest_->size() != config.numTrees) throw ParseError("forest size disagrees with config", lineNo);

  std::size_t windowCount = 0;
  if (!(next() >> tag >> windowCount) || tag != "window") throw ParseError("bad window line", lineNo);
  std::vector<LabeledSample> samples(windowCount);
  for (auto& s : samples) {
    auto row = next();
    unsigned long long id = 0;
    long long arrival = 0;
    if (!(row >> id >> arrival >> s.label)) throw ParseError("bad window row", lineNo);
    s.id = id;
    s.arrivalBlock = arrival;
    std::string word;
    while (row >> word) s.features.push_back(std::strtod(word.c_str(), nullptr));
    if (s.features.size() != schema.numFeatures) throw ParseError("window row has wrong attribute count", lineNo);
  }
  sf.cache_.emplace(config.windowSize, config.numTrees, sf.forest_->epoch());
  sf.cache_->push_samples(samples, *sf.forest_);
  sf.currentBlock_ = currentBlock;
  return sf;
}

}  // namespace pdsrf
