#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "pdsrf/random.hpp"

namespace pdsrf {

struct LabeledSample {
  std::uint64_t id = 0;
  std::vector<double> features;
  int label = 0;
  std::int64_t arrivalBlock = 0;
};

struct Block {
  std::size_t index = 0;
  std::vector<LabeledSample> samples;
};

struct StreamSchema {
  std::size_t numFeatures = 0;
  std::size_t numClasses = 0;
  // Column holding the label; -1 means the last column.
  int labelColumn = -1;
  // Raw label value that maps to class 0 (1 for 1-based files such as CoverType).
  int labelBase = 0;

  void validate() const;
};

/// Pull-style source of labeled samples with sequential ids.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual const StreamSchema& schema() const = 0;
  virtual std::optional<LabeledSample> next() = 0;
};

// ---------------------------------------------------------------------------
// CSV

/// One streaming pass over a CSV file that infers the attribute count, the
/// label base (0 or 1, whichever is the smallest label) and the class count.
/// A non-numeric first row is treated as a header.
StreamSchema scan_csv_schema(const std::filesystem::path& path, int labelColumn = -1);

class CsvReader final : public SampleSource {
 public:
  CsvReader(const std::filesystem::path& path, StreamSchema schema);

  const StreamSchema& schema() const override { return schema_; }
  std::optional<LabeledSample> next() override;

 private:
  std::ifstream in_;
  StreamSchema schema_;
  std::size_t lineNo_ = 0;
  std::uint64_t nextId_ = 0;
  bool first_ = true;
  std::vector<double> row_;
};

/// Reads the whole file; convenience for tests and small inputs.
std::vector<LabeledSample> read_csv_stream(const std::filesystem::path& path, const StreamSchema& schema);

void write_csv(const std::filesystem::path& path, const std::vector<LabeledSample>& samples,
               bool header = true);

// ---------------------------------------------------------------------------
// Synthetic shifting-hyperplane stream

enum class DriftKind { none, sudden, gradual };

struct DriftStreamSpec {
  std::size_t numFeatures = 10;
  std::size_t numClasses = 2;
  std::size_t numSamples = 20000;
  DriftKind drift = DriftKind::none;
  std::size_t driftStart = 0;  // s0
  std::size_t driftEnd = 0;    // s1, gradual only
  double noise = 0.0;

  void validate() const;
};

DriftKind parse_drift_kind(const std::string& s);
std::string to_string(DriftKind kind);

/// Features are uniform on [0,1]^D. Each concept is a unit direction w
/// through the cube centre; the projection w.(x - 0.5) is cut into C classes
/// at equal-mass thresholds. Concept A is random and concept B is A rotated
/// by 90 degrees in a random plane. Concept A labels samples before the drift,
/// concept B after it; during a gradual drift the probability of using B
/// ramps linearly from 0 at s0 to 1 at s1. Noise replaces the concept label
/// with a uniformly chosen different class.
class DriftStreamGenerator final : public SampleSource {
 public:
  DriftStreamGenerator(DriftStreamSpec spec, std::uint64_t seed);

  const StreamSchema& schema() const override { return schema_; }
  std::optional<LabeledSample> next() override;

  /// Noise-free label of `features` under concept 0 (A) or 1 (B).
  int concept_label(int which, const std::vector<double>& features) const;
  /// Probability that sample at stream position `pos` is labeled by concept B.
  double concept_b_probability(std::size_t pos) const;
  const DriftStreamSpec& spec() const { return spec_; }

 private:
  struct Concept {
    std::vector<double> direction;
    std::vector<double> cuts;  // C-1 ascending thresholds on the projection
  };
  Concept make_concept(Rng& rng, const Concept* from) const;

  DriftStreamSpec spec_;
  StreamSchema schema_;
  Concept concepts_[2];
  Rng featureRng_;
  Rng labelRng_;
  std::size_t pos_ = 0;
};

std::vector<LabeledSample> generate_drift_stream(const DriftStreamSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Blocks

/// Splits a sequence into consecutive blocks; the final block may be short.
/// Each sample's arrivalBlock is set to its block index.
std::vector<Block> chunk(const std::vector<LabeledSample>& stream, std::size_t blockSize);

/// Lazy chunking of a SampleSource.
class BlockReader {
 public:
  BlockReader(SampleSource& source, std::size_t blockSize);

  std::optional<Block> next();

 private:
  SampleSource& source_;
  std::size_t blockSize_;
  std::size_t nextIndex_ = 0;
};

}  // namespace pdsrf
