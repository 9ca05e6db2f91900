#include "pdsrf/eval.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pdsrf/errors.hpp"

namespace pdsrf {

std::unique_ptr<StreamClassifier> make_classifier(const std::string& model, const PdsrfConfig& config,
                                                  const StreamSchema& schema) {
  if (model == "pdsrf") return std::make_unique<ForestClassifier>("pdsrf", make_pdsrf(config, schema));
  if (model == "rf-rtl") return std::make_unique<ForestClassifier>("rf-rtl", make_rf_rtl(config, schema));
  if (model == "majority") return std::make_unique<MajorityClassifier>(schema.numClasses);
  throw ConfigError("unknown model '" + model + "' (expected pdsrf, rf-rtl or majority)");
}

namespace {

class BlockLoop {
 public:
  explicit BlockLoop(StreamClassifier& c) : classifier_(c) {}

  void consume(const Block& block) {
    if (!initialized_) {
      classifier_.initialize(block);
      initialized_ = true;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    BlockMetrics m;
    m.blockIndex = block.index;
    m.sampleCount = block.samples.size();
    for (const auto& s : block.samples) m.correct += classifier_.classify(s.features) == s.label;
    m.accuracy = m.sampleCount ? static_cast<double>(m.correct) / static_cast<double>(m.sampleCount) : 0.0;
    m.replacements = classifier_.update(block);
    m.wallTimeMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    accSum_ += m.accuracy;
    m.cumulativeMeanAccuracy = accSum_ / static_cast<double>(metrics_.size() + 1);
    metrics_.push_back(m);
  }

  std::vector<BlockMetrics> finish() {
    if (metrics_.empty()) throw ConfigError("block evaluation needs a stream of at least two blocks");
    return std::move(metrics_);
  }

 private:
  StreamClassifier& classifier_;
  bool initialized_ = false;
  double accSum_ = 0.0;
  std::vector<BlockMetrics> metrics_;
};

}  // namespace

std::vector<BlockMetrics> run_block_evaluation(StreamClassifier& classifier, BlockReader& blocks) {
  BlockLoop loop(classifier);
  while (auto b = blocks.next()) loop.consume(*b);
  return loop.finish();
}

std::vector<BlockMetrics> run_block_evaluation(StreamClassifier& classifier, std::span<const Block> blocks) {
  if (blocks.size() < 2) throw ConfigError("block evaluation needs a stream of at least two blocks");
  BlockLoop loop(classifier);
  for (const auto& b : blocks) loop.consume(b);
  return loop.finish();
}

double mean_accuracy(std::span<const BlockMetrics> metrics) {
  if (metrics.empty()) throw DomainError("mean accuracy of no scored blocks");
  double sum = 0;
  for (const auto& m : metrics) sum += m.accuracy;
  return sum / static_cast<double>(metrics.size());
}

void emit_report(std::span<const BlockMetrics> metrics, const std::filesystem::path& path, ReportOptions options) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write report " + path.string());
  std::fprintf(f, "block,accuracy,cum_mean,replacements,ms\n");
  for (const auto& m : metrics)
    std::fprintf(f, "%zu,%.17g,%.17g,%zu,%.17g\n", m.blockIndex, m.accuracy, m.cumulativeMeanAccuracy,
                 m.replacements, options.includeTiming ? m.wallTimeMs : 0.0);
  if (std::fclose(f) != 0) throw std::runtime_error("failed writing report " + path.string());
}

std::vector<ReportRow> read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report " + path.string());
  std::string line;
  std::size_t lineNo = 1;
  if (!std::getline(in, line) || line != "block,accuracy,cum_mean,replacements,ms")
    throw ParseError("missing report header", 1);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream fields(line);
    ReportRow r;
    std::string acc, cum, ms;
    if (!(fields >> r.block >> acc >> cum >> r.replacements >> ms)) throw ParseError("malformed report row", lineNo);
    r.accuracy = std::strtod(acc.c_str(), nullptr);
    r.cumMean = std::strtod(cum.c_str(), nullptr);
    r.ms = std::strtod(ms.c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace pdsrf
