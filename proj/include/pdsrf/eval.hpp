#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdsrf/baseline.hpp"
#include "pdsrf/stream.hpp"
#include "pdsrf/streaming_forest.hpp"

namespace pdsrf {

/// What the block harness needs from a model.
class StreamClassifier {
 public:
  virtual ~StreamClassifier() = default;
  virtual std::string name() const = 0;
  /// Train-only pass on block 0.
  virtual void initialize(const Block& first) = 0;
  virtual int classify(std::span<const double> features) = 0;
  /// Returns the number of ensemble members replaced.
  virtual std::size_t update(const Block& block) = 0;
};

class ForestClassifier final : public StreamClassifier {
 public:
  ForestClassifier(std::string name, StreamingForest model) : name_(std::move(name)), model_(std::move(model)) {}

  std::string name() const override { return name_; }
  void initialize(const Block& first) override { model_.initialize(first); }
  int classify(std::span<const double> features) override { return model_.classify(features); }
  std::size_t update(const Block& block) override { return model_.update(block).steps.size(); }

  const StreamingForest& model() const { return model_; }

 private:
  std::string name_;
  StreamingForest model_;
};

class MajorityClassifier final : public StreamClassifier {
 public:
  explicit MajorityClassifier(std::size_t numClasses) : majority_(numClasses) {}

  std::string name() const override { return "majority"; }
  void initialize(const Block& first) override { update(first); }
  int classify(std::span<const double>) override { return majority_.predict(); }
  std::size_t update(const Block& block) override {
    for (const auto& s : block.samples) majority_.observe(s.label);
    return 0;
  }

 private:
  MajorityClass majority_;
};

/// Builds "pdsrf", "rf-rtl" or "majority".
std::unique_ptr<StreamClassifier> make_classifier(const std::string& model, const PdsrfConfig& config,
                                                  const StreamSchema& schema);

struct BlockMetrics {
  std::size_t blockIndex = 0;
  double accuracy = 0.0;
  std::size_t sampleCount = 0;
  std::size_t correct = 0;
  std::size_t replacements = 0;
  double cumulativeMeanAccuracy = 0.0;
  double wallTimeMs = 0.0;
};

/// Data-block test-then-train loop. Block 0 only initializes the model; every
/// later block is classified sample by sample and scored before the model
/// sees it through update(). Needs at least two blocks.
std::vector<BlockMetrics> run_block_evaluation(StreamClassifier& classifier, BlockReader& blocks);
std::vector<BlockMetrics> run_block_evaluation(StreamClassifier& classifier, std::span<const Block> blocks);

/// Unweighted mean of per-block accuracies. Throws DomainError when empty.
double mean_accuracy(std::span<const BlockMetrics> metrics);

struct ReportOptions {
  // false: ms column is written as 0.
  bool includeTiming = false;
};

/// CSV with header `block,accuracy,cum_mean,replacements,ms`, one row per
/// scored block.
void emit_report(std::span<const BlockMetrics> metrics, const std::filesystem::path& path,
                 ReportOptions options = {});

struct ReportRow {
  std::size_t block = 0;
  double accuracy = 0.0;
  double cumMean = 0.0;
  std::size_t replacements = 0;
  double ms = 0.0;
};

std::vector<ReportRow> read_report(const std::filesystem::path& path);

}  // namespace pdsrf
