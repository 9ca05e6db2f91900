#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdsrf/stream.hpp"
#include "pdsrf/tree.hpp"
#include "pdsrf/weighting.hpp"

namespace pdsrf {

inline constexpr std::uint64_t kDefaultSeed = 20160417;

struct PdsrfConfig {
  std::size_t blockSize = 300;
  std::size_t windowSize = 1500;
  std::size_t k = 20;
  std::size_t numTrees = 30;
  std::size_t mtry = 0;  // 0: round(sqrt(D))
  std::size_t minLeafSize = 1;
  std::size_t maxDepth = 0;  // 0: unlimited
  double epsilon = 0.01;
  double alpha = 0.05;
  double theta = 0.05;
  std::size_t maxReplacementsPerBlock = 5;
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 1;

  /// Checks everything that does not depend on the stream schema.
  void validate() const;
  WeightingParams weighting() const { return {epsilon, alpha}; }
  GrowthConfig growth(const StreamSchema& schema) const;
};

/// Ordered (key, value) pairs; keys match the CLI flag names without dashes.
std::vector<std::pair<std::string, std::string>> config_entries(const PdsrfConfig& cfg);
/// One `key=value` line per field, in a fixed order.
std::string format_config(const PdsrfConfig& cfg);
/// Sets one field by key. Throws ConfigError on unknown keys or bad values.
void set_config_value(PdsrfConfig& cfg, const std::string& key, const std::string& value);
/// Applies `key=value` lines on top of `base`. Blank lines and lines starting
/// with '#' are ignored.
PdsrfConfig parse_config_text(const std::string& text, PdsrfConfig base = {});
PdsrfConfig load_config_file(const std::string& path, PdsrfConfig base = {});

}  // namespace pdsrf
