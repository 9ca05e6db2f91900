#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "pdsrf/config.hpp"
#include "pdsrf/errors.hpp"
#include "pdsrf/eval.hpp"
#include "pdsrf/streaming_forest.hpp"

namespace pdsrf::cli {

namespace {

// Raised for bad flag values discovered after CLI11 parsing; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + v + "' for " + key);
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + v + "' for " + key);
  }
}

/// One optional string per PdsrfConfig key, registered as --<key>.
struct ConfigFlags {
  std::string configFile;
  std::map<std::string, std::optional<std::string>> values;

  void attach(CLI::App& app) {
    app.add_option("--config", configFile, "key=value config file; flags take precedence");
    for (const auto& [key, def] : config_entries(PdsrfConfig{})) {
      auto& slot = values[key];
      app.add_option("--" + key, slot, "default " + def);
    }
  }

  PdsrfConfig resolve() const {
    PdsrfConfig cfg;
    try {
      if (!configFile.empty()) cfg = load_config_file(configFile, cfg);
      for (const auto& [key, v] : values)
        if (v) set_config_value(cfg, key, *v);
      cfg.validate();
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

int evaluate(const std::string& model, const std::string& data, const std::string& synthetic,
             const std::string& outPath, int labelColumn, bool timing, const std::string& snapshotOut,
             const PdsrfConfig& cfg, std::ostream& out) {
  std::unique_ptr<SampleSource> source;
  if (!data.empty()) {
    const StreamSchema schema = scan_csv_schema(data, labelColumn);
    if (schema.numFeatures == 0) throw ConfigError("no samples in " + data);
    schema.validate();
    source = std::make_unique<CsvReader>(data, schema);
  } else {
    SyntheticSpec spec;
    try {
      spec = parse_synthetic_spec(synthetic);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    source = std::make_unique<DriftStreamGenerator>(spec.stream, spec.seed.value_or(cfg.seed));
  }

  const auto start = std::chrono::steady_clock::now();
  auto classifier = make_classifier(model, cfg, source->schema());
  BlockReader blocks(*source, cfg.blockSize);
  const auto metrics = run_block_evaluation(*classifier, blocks);
  const auto wallMs =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

  emit_report(metrics, outPath, ReportOptions{timing});
  if (!snapshotOut.empty()) {
    const auto* forest = dynamic_cast<const ForestClassifier*>(classifier.get());
    if (!forest) throw ConfigError("--snapshot-out needs a forest model");
    std::ofstream snap(snapshotOut, std::ios::binary);
    snap << forest->model().snapshot();
    if (!snap) throw std::runtime_error("cannot write snapshot " + snapshotOut);
  }

  char line[128];
  std::snprintf(line, sizeof line, "mean_accuracy=%.6f blocks=%zu wall_ms=%lld\n", mean_accuracy(metrics),
                metrics.size(), static_cast<long long>(wallMs));
  out << line;
  return 0;
}

int inspect_snapshot(const std::string& path, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto model = StreamingForest::restore(ss.str());
  const auto& forest = model.forest();
  std::size_t leaves = 0;
  for (const auto& t : forest.trees()) leaves += t.num_leaves();
  out << "policy=" << (model.policy().vote == VoteRule::unweighted ? "rf-rtl" : "pdsrf") << "\n"
      << "current_block=" << model.current_block() << "\n"
      << "trees=" << forest.size() << "\n"
      << "forest_epoch=" << forest.epoch() << "\n"
      << "mean_leaves=" << static_cast<double>(leaves) / static_cast<double>(forest.size()) << "\n"
      << "window=" << model.cache().size() << "\n";
  return 0;
}

}  // namespace

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  SyntheticSpec spec;
  std::stringstream ss(text);
  std::string item;
  bool sawUntil = false;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("synthetic spec item '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq), v = item.substr(eq + 1);
    if (key == "drift") spec.stream.drift = parse_drift_kind(v);
    else if (key == "at") spec.stream.driftStart = to_size(key, v);
    else if (key == "until") {
      spec.stream.driftEnd = to_size(key, v);
      sawUntil = true;
    } else if (key == "n") spec.stream.numSamples = to_size(key, v);
    else if (key == "d") spec.stream.numFeatures = to_size(key, v);
    else if (key == "c") spec.stream.numClasses = to_size(key, v);
    else if (key == "noise") spec.stream.noise = to_double(key, v);
    else if (key == "seed") spec.seed = to_size(key, v);
    else throw ConfigError("unknown synthetic spec key '" + key + "'");
  }
  if (!sawUntil) spec.stream.driftEnd = spec.stream.driftStart;
  spec.stream.validate();
  return spec;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximity-driven streaming random forest"};
  app.require_subcommand(1);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "test-then-train block evaluation");
  std::string model = "pdsrf", data, synthetic, outPath, snapshotOut;
  int labelColumn = -1;
  bool timing = false;
  ConfigFlags evalFlags;
  eval->add_option("--model", model, "pdsrf, rf-rtl or majority")
      ->check(CLI::IsMember({"pdsrf", "rf-rtl", "majority"}))
      ->required();
  auto* dataOpt = eval->add_option("--data", data, "CSV file, label in the last column unless --label-column");
  auto* synthOpt = eval->add_option("--synthetic", synthetic, "generator spec, e.g. drift=sudden,at=5000,n=20000");
  dataOpt->excludes(synthOpt);
  eval->add_option("--out", outPath, "report CSV path")->required();
  eval->add_option("--label-column", labelColumn, "0-based label column (-1: last)");
  eval->add_flag("--timing", timing, "write per-block wall time into the report's ms column");
  eval->add_option("--snapshot-out", snapshotOut, "write the final model snapshot here");
  evalFlags.attach(*eval);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic drifting stream as CSV");
  std::string drift = "none", genOut;
  DriftStreamSpec gspec;
  std::uint64_t genSeed = kDefaultSeed;
  gen->add_option("--drift", drift, "none, sudden or gradual")->check(CLI::IsMember({"none", "sudden", "gradual"}));
  gen->add_option("--at", gspec.driftStart, "drift start (sample position)");
  auto* untilOpt = gen->add_option("--until", gspec.driftEnd, "gradual drift end (sample position)");
  gen->add_option("--n", gspec.numSamples, "number of samples");
  gen->add_option("--d", gspec.numFeatures, "attribute count");
  gen->add_option("--c", gspec.numClasses, "class count");
  gen->add_option("--noise", gspec.noise, "label noise rate in [0, 1)");
  gen->add_option("--seed", genSeed, "generator seed");
  gen->add_option("--out", genOut, "output CSV")->required();

  // inspect
  auto* insp = app.add_subcommand("inspect", "show resolved configuration or a model snapshot");
  bool printConfig = false;
  std::string snapshotIn;
  ConfigFlags inspFlags;
  insp->add_flag("--print-config", printConfig, "echo the fully resolved configuration");
  insp->add_option("--snapshot", snapshotIn, "summarize a model snapshot");
  inspFlags.attach(*insp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) {
      if (data.empty() && synthetic.empty()) throw UsageError("evaluate needs --data or --synthetic");
      return evaluate(model, data, synthetic, outPath, labelColumn, timing, snapshotOut, evalFlags.resolve(), out);
    }
    if (*gen) {
      try {
        gspec.drift = parse_drift_kind(drift);
        if (untilOpt->count() == 0) gspec.driftEnd = gspec.driftStart;
        gspec.validate();
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      write_csv(genOut, generate_drift_stream(gspec, genSeed));
      return 0;
    }
    if (*insp) {
      const PdsrfConfig cfg = inspFlags.resolve();
      if (!printConfig && snapshotIn.empty()) throw UsageError("inspect needs --print-config or --snapshot");
      if (printConfig) out << format_config(cfg);
      if (!snapshotIn.empty()) inspect_snapshot(snapshotIn, out);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace pdsrf::cli
