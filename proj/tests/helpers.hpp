#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pdsrf/random.hpp"
#include "pdsrf/stream.hpp"
#include "pdsrf/tree.hpp"

namespace pdsrf::testing {

inline std::filesystem::path temp_path(const std::string& name) {
  const char* dir = std::getenv("PDSRF_TMP");
  std::filesystem::path base = dir ? dir : std::filesystem::temp_directory_path();
  return base / name;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Samples with uniform [0,1) features and uniformly random labels.
inline std::vector<LabeledSample> random_samples(std::size_t n, std::size_t d, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, static_cast<int>(c) - 1);
  std::vector<LabeledSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = i;
    out[i].features.resize(d);
    for (double& v : out[i].features) v = u(rng);
    out[i].label = lab(rng);
  }
  return out;
}

inline std::vector<TrainingRow> rows_of(const std::vector<LabeledSample>& samples, double weight = 1.0) {
  std::vector<TrainingRow> rows;
  for (const auto& s : samples) rows.push_back({s.features, s.label, weight});
  return rows;
}

inline GrowthConfig growth_for(std::size_t d, std::size_t c, std::size_t mtry = 0) {
  GrowthConfig g;
  g.numFeatures = d;
  g.numClasses = c;
  g.mtry = mtry == 0 ? default_mtry(d) : mtry;
  return g;
}

inline Tree random_tree(std::size_t n, std::size_t d, std::size_t c, std::uint64_t seed) {
  const auto samples = random_samples(n, d, c, seed);
  return build_tree(rows_of(samples), growth_for(d, c), seed + 1);
}

}  // namespace pdsrf::testing
