#include <doctest.h>

#include <regex>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "pdsrf/config.hpp"
#include "pdsrf/errors.hpp"
#include "pdsrf/eval.hpp"

using namespace pdsrf;
using pdsrf::testing::read_text;
using pdsrf::testing::temp_path;
using pdsrf::testing::write_text;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"evaluate", "--model", "pdsrf"}).code == 2);
  CHECK(run({"evaluate", "--model", "pdsrf", "--out", temp_path("x.csv").string()}).code == 2);
  CHECK(run({"evaluate", "--model", "svm", "--synthetic", "n=600", "--out", "x.csv"}).code == 2);
  CHECK(run({"evaluate", "--model", "pdsrf", "--synthetic", "n=600", "--out", "x.csv", "--bogus", "1"}).code == 2);
  CHECK(run({"evaluate", "--model", "pdsrf", "--synthetic", "n=600", "--out", "x.csv", "--k", "abc"}).code == 2);
  CHECK(run({"evaluate", "--model", "pdsrf", "--synthetic", "n=600", "--out", "x.csv", "--k", "5000"}).code == 2);
  CHECK(run({"evaluate", "--model", "pdsrf", "--synthetic", "drift=sideways", "--out", "x.csv"}).code == 2);
  CHECK(run({"generate", "--drift", "gradual", "--at", "10", "--until", "5", "--out", "x.csv"}).code == 2);
  CHECK(run({"inspect"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli: runtime failures exit 1") {
  const auto r = run({"evaluate", "--model", "pdsrf", "--data", "/nonexistent/data.csv", "--out",
                      temp_path("never.csv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);

  const auto bad = temp_path("bad_rows.csv");
  write_text(bad, "1,2,0\n3,x,1\n");
  CHECK(run({"evaluate", "--model", "pdsrf", "--data", bad.string(), "--out", temp_path("r.csv").string()}).code ==
        1);
  CHECK(run({"inspect", "--snapshot", "/nonexistent/snap.txt"}).code == 1);
}

TEST_CASE("cli: generate is deterministic and readable") {
  const auto a = temp_path("gen_a.csv"), b = temp_path("gen_b.csv");
  for (const auto& p : {a, b})
    REQUIRE(run({"generate", "--drift", "sudden", "--at", "500", "--n", "2000", "--seed", "7", "--out", p.string()})
                .code == 0);
  CHECK(read_text(a) == read_text(b));
  const auto schema = scan_csv_schema(a);
  CHECK(schema.numFeatures == 10);
  CHECK(schema.numClasses == 2);
  const auto samples = read_csv_stream(a, schema);
  const auto direct = generate_drift_stream({10, 2, 2000, DriftKind::sudden, 500, 500, 0.0}, 7);
  REQUIRE(samples.size() == direct.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].features == direct[i].features);
    CHECK(samples[i].label == direct[i].label);
  }
}

TEST_CASE("cli: evaluate prints the summary line and writes the report") {
  const auto data = temp_path("eval_data.csv");
  REQUIRE(run({"generate", "--n", "1500", "--noise", "0.05", "--seed", "3", "--out", data.string()}).code == 0);
  const auto report = temp_path("eval_report.csv");
  const auto snap = temp_path("eval_snapshot.txt");
  const auto r = run({"evaluate", "--model", "pdsrf", "--data", data.string(), "--out", report.string(), "--trees",
                      "5", "--snapshot-out", snap.string()});
  REQUIRE(r.code == 0);
  CHECK(std::regex_match(r.out, std::regex("mean_accuracy=[0-9]+\\.[0-9]{6} blocks=4 wall_ms=[0-9]+\n")));
  CHECK(read_report(report).size() == 4);

  const auto info = run({"inspect", "--snapshot", snap.string()});
  REQUIRE(info.code == 0);
  CHECK(info.out.find("policy=pdsrf\n") != std::string::npos);
  CHECK(info.out.find("trees=5\n") != std::string::npos);
  CHECK(info.out.find("current_block=5\n") != std::string::npos);
  CHECK(info.out.find("window=1500\n") != std::string::npos);

  const auto timed = temp_path("eval_timed.csv");
  REQUIRE(run({"evaluate", "--model", "majority", "--synthetic", "n=900,seed=2", "--out", timed.string(), "--timing"})
              .code == 0);
  CHECK(read_report(timed).size() == 2);
}

TEST_CASE("cli: paired pdsrf and rf-rtl runs report the same blocks") {
  const auto pa = temp_path("paired_pdsrf.csv"), pb = temp_path("paired_rtl.csv");
  const std::string synth = "drift=gradual,at=600,until=1200,n=2100,noise=0.05,seed=4";
  REQUIRE(run({"evaluate", "--model", "pdsrf", "--synthetic", synth, "--out", pa.string(), "--trees", "6"}).code == 0);
  REQUIRE(run({"evaluate", "--model", "rf-rtl", "--synthetic", synth, "--out", pb.string(), "--trees", "6"}).code == 0);
  const auto a = read_report(pa), b = read_report(pb);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].block == b[i].block);
}

TEST_CASE("cli: every config field has a flag, flags override the config file") {
  const auto file = temp_path("cfg.txt");
  write_text(file, "# comment\nk=7\ntrees=11\n");
  const auto r = run({"inspect", "--print-config", "--config", file.string(), "--trees", "13"});
  REQUIRE(r.code == 0);
  const auto cfg = parse_config_text(r.out);
  CHECK(cfg.k == 7);
  CHECK(cfg.numTrees == 13);
  CHECK(r.out == run({"inspect", "--print-config", "--config", file.string(), "--trees", "13"}).out);

  // Set every key to a non-default value through its flag.
  const auto entries = config_entries(PdsrfConfig{});
  const std::map<std::string, std::string> custom{
      {"block-size", "250"}, {"window-size", "1000"}, {"k", "9"},        {"trees", "17"},
      {"mtry", "2"},         {"min-leaf-size", "3"},  {"max-depth", "8"}, {"epsilon", "0.02"},
      {"alpha", "0.2"},      {"theta", "0.3"},        {"max-replacements", "4"}, {"seed", "99"},
      {"workers", "2"}};
  REQUIRE(custom.size() == entries.size());
  std::vector<std::string> args{"inspect", "--print-config"};
  for (const auto& [key, v] : entries) {
    REQUIRE(custom.count(key) == 1);
    args.push_back("--" + key);
    args.push_back(custom.at(key));
  }
  const auto all = run(args);
  REQUIRE(all.code == 0);
  for (const auto& [key, v] : config_entries(parse_config_text(all.out))) CHECK(v == custom.at(key));
}

TEST_CASE("cli: synthetic spec parsing") {
  const auto s = cli::parse_synthetic_spec("drift=gradual,at=1000,until=2000,n=30000,d=5,c=3,noise=0.1,seed=3");
  CHECK(s.stream.drift == DriftKind::gradual);
  CHECK(s.stream.driftStart == 1000);
  CHECK(s.stream.driftEnd == 2000);
  CHECK(s.stream.numSamples == 30000);
  CHECK(s.stream.numFeatures == 5);
  CHECK(s.stream.numClasses == 3);
  CHECK(s.stream.noise == 0.1);
  CHECK(s.seed == 3u);
  CHECK_FALSE(cli::parse_synthetic_spec("n=10").seed.has_value());
  CHECK_THROWS_AS(cli::parse_synthetic_spec("colour=blue"), ConfigError);
  CHECK_THROWS_AS(cli::parse_synthetic_spec("noise=1.5"), ConfigError);
}
