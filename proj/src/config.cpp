#include "pdsrf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pdsrf/errors.hpp"

namespace pdsrf {

void PdsrfConfig::validate() const {
  if (blockSize < 1) throw ConfigError("block-size must be at least 1");
  if (windowSize < 1) throw ConfigError("window-size must be at least 1");
  if (blockSize > windowSize) throw ConfigError("block-size must not exceed window-size");
  if (k < 1 || k > windowSize) throw ConfigError("k must lie in [1, window-size]");
  if (numTrees < 1 || numTrees > 65535) throw ConfigError("trees must lie in [1, 65535]");
  if (minLeafSize < 1) throw ConfigError("min-leaf-size must be at least 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (maxReplacementsPerBlock > numTrees) throw ConfigError("max-replacements must not exceed trees");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  weighting().validate();
}

GrowthConfig PdsrfConfig::growth(const StreamSchema& schema) const {
  GrowthConfig g;
  g.numFeatures = schema.numFeatures;
  g.numClasses = schema.numClasses;
  g.mtry = mtry == 0 ? default_mtry(schema.numFeatures) : mtry;
  g.minLeafSize = minLeafSize;
  g.maxDepth = maxDepth;
  g.validate();
  return g;
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_entries(const PdsrfConfig& c) {
  return {
      {"block-size", std::to_string(c.blockSize)},
      {"window-size", std::to_string(c.windowSize)},
      {"k", std::to_string(c.k)},
      {"trees", std::to_string(c.numTrees)},
      {"mtry", std::to_string(c.mtry)},
      {"min-leaf-size", std::to_string(c.minLeafSize)},
      {"max-depth", std::to_string(c.maxDepth)},
      {"epsilon", fmt_double(c.epsilon)},
      {"alpha", fmt_double(c.alpha)},
      {"theta", fmt_double(c.theta)},
      {"max-replacements", std::to_string(c.maxReplacementsPerBlock)},
      {"seed", std::to_string(c.seed)},
      {"workers", std::to_string(c.workers)},
  };
}

std::string format_config(const PdsrfConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + "=" + v + "\n";
  return out;
}

void set_config_value(PdsrfConfig& c, const std::string& key, const std::string& value) {
  using Size = std::size_t;
  if (key == "block-size") c.blockSize = parse_number<Size>(key, value);
  else if (key == "window-size") c.windowSize = parse_number<Size>(key, value);
  else if (key == "k") c.k = parse_number<Size>(key, value);
  else if (key == "trees") c.numTrees = parse_number<Size>(key, value);
  else if (key == "mtry") c.mtry = parse_number<Size>(key, value);
  else if (key == "min-leaf-size") c.minLeafSize = parse_number<Size>(key, value);
  else if (key == "max-depth") c.maxDepth = parse_number<Size>(key, value);
  else if (key == "epsilon") c.epsilon = parse_number<double>(key, value);
  else if (key == "alpha") c.alpha = parse_number<double>(key, value);
  else if (key == "theta") c.theta = parse_number<double>(key, value);
  else if (key == "max-replacements") c.maxReplacementsPerBlock = parse_number<Size>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "workers") c.workers = parse_number<Size>(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

PdsrfConfig parse_config_text(const std::string& text, PdsrfConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineNo) + " is not key=value");
    set_config_value(base, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return base;
}

PdsrfConfig load_config_file(const std::string& path, PdsrfConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

}  // namespace pdsrf
