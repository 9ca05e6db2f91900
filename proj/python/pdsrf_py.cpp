#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pdsrf/baseline.hpp"
#include "pdsrf/config.hpp"
#include "pdsrf/errors.hpp"
#include "pdsrf/eval.hpp"
#include "pdsrf/streaming_forest.hpp"
#include "pdsrf/weighting.hpp"

namespace py = pybind11;
using namespace pdsrf;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Proximity-driven streaming random forest";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StalenessError>(m, "StalenessError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<PdsrfConfig>(m, "PdsrfConfig")
      .def(py::init<>())
      .def_readwrite("block_size", &PdsrfConfig::blockSize)
      .def_readwrite("window_size", &PdsrfConfig::windowSize)
      .def_readwrite("k", &PdsrfConfig::k)
      .def_readwrite("num_trees", &PdsrfConfig::numTrees)
      .def_readwrite("mtry", &PdsrfConfig::mtry)
      .def_readwrite("min_leaf_size", &PdsrfConfig::minLeafSize)
      .def_readwrite("max_depth", &PdsrfConfig::maxDepth)
      .def_readwrite("epsilon", &PdsrfConfig::epsilon)
      .def_readwrite("alpha", &PdsrfConfig::alpha)
      .def_readwrite("theta", &PdsrfConfig::theta)
      .def_readwrite("max_replacements_per_block", &PdsrfConfig::maxReplacementsPerBlock)
      .def_readwrite("seed", &PdsrfConfig::seed)
      .def_readwrite("workers", &PdsrfConfig::workers)
      .def("validate", &PdsrfConfig::validate)
      .def("__str__", [](const PdsrfConfig& c) { return format_config(c); });

  py::class_<StreamSchema>(m, "StreamSchema")
      .def(py::init([](std::size_t d, std::size_t c) { return StreamSchema{d, c}; }), py::arg("num_features"),
           py::arg("num_classes"))
      .def_readwrite("num_features", &StreamSchema::numFeatures)
      .def_readwrite("num_classes", &StreamSchema::numClasses)
      .def_readwrite("label_column", &StreamSchema::labelColumn)
      .def_readwrite("label_base", &StreamSchema::labelBase);

  py::class_<LabeledSample>(m, "LabeledSample")
      .def(py::init([](std::vector<double> x, int label, std::uint64_t id, std::int64_t arrival) {
             return LabeledSample{id, std::move(x), label, arrival};
           }),
           py::arg("features"), py::arg("label"), py::arg("id") = 0, py::arg("arrival_block") = 0)
      .def_readwrite("id", &LabeledSample::id)
      .def_readwrite("features", &LabeledSample::features)
      .def_readwrite("label", &LabeledSample::label)
      .def_readwrite("arrival_block", &LabeledSample::arrivalBlock);

  py::class_<Block>(m, "Block")
      .def(py::init([](std::size_t index, std::vector<LabeledSample> samples) {
             for (auto& s : samples) s.arrivalBlock = static_cast<std::int64_t>(index);
             return Block{index, std::move(samples)};
           }),
           py::arg("index"), py::arg("samples"))
      .def_readonly("index", &Block::index)
      .def_readonly("samples", &Block::samples);

  py::enum_<DriftKind>(m, "DriftKind")
      .value("none", DriftKind::none)
      .value("sudden", DriftKind::sudden)
      .value("gradual", DriftKind::gradual);

  py::class_<DriftStreamSpec>(m, "DriftStreamSpec")
      .def(py::init<>())
      .def_readwrite("num_features", &DriftStreamSpec::numFeatures)
      .def_readwrite("num_classes", &DriftStreamSpec::numClasses)
      .def_readwrite("num_samples", &DriftStreamSpec::numSamples)
      .def_readwrite("drift", &DriftStreamSpec::drift)
      .def_readwrite("drift_start", &DriftStreamSpec::driftStart)
      .def_readwrite("drift_end", &DriftStreamSpec::driftEnd)
      .def_readwrite("noise", &DriftStreamSpec::noise);

  m.def("generate_drift_stream", &generate_drift_stream, py::arg("spec"), py::arg("seed"));
  m.def("chunk", &chunk, py::arg("stream"), py::arg("block_size"));
  m.def(
      "read_csv",
      [](const std::filesystem::path& path, int labelColumn) {
        const auto schema = scan_csv_schema(path, labelColumn);
        return py::make_tuple(schema, read_csv_stream(path, schema));
      },
      py::arg("path"), py::arg("label_column") = -1);

  m.def("classifier_weight", &classifier_weight, py::arg("error"), py::arg("epsilon"));
  m.def("temporal_weight", &temporal_weight, py::arg("age"), py::arg("alpha"));
  m.def(
      "gini_impurity", [](const std::vector<double>& w) { return gini_impurity(w); }, py::arg("class_weights"));

  py::class_<UpdateReport>(m, "UpdateReport")
      .def_readonly("block_index", &UpdateReport::blockIndex)
      .def_readonly("error_before", &UpdateReport::errorBefore)
      .def_readonly("error_after", &UpdateReport::errorAfter)
      .def_property_readonly("replaced", &UpdateReport::replaced);

  py::class_<StreamingForest>(m, "StreamingForest")
      .def("initialize", &StreamingForest::initialize, py::arg("block"))
      .def("initialized", &StreamingForest::initialized)
      .def(
          "predict", [](const StreamingForest& f, const std::vector<double>& x) { return f.predict(x).probs; },
          py::arg("features"))
      .def(
          "classify", [](const StreamingForest& f, const std::vector<double>& x) { return f.classify(x); },
          py::arg("features"))
      .def("update", &StreamingForest::update, py::arg("block"))
      .def_property_readonly("num_trees", [](const StreamingForest& f) { return f.forest().size(); })
      .def_property_readonly("forest_epoch", [](const StreamingForest& f) { return f.forest().epoch(); })
      .def_property_readonly("window_size", [](const StreamingForest& f) { return f.cache().size(); })
      .def_property_readonly("current_block", &StreamingForest::current_block)
      .def("snapshot", &StreamingForest::snapshot)
      .def_static("restore", &StreamingForest::restore, py::arg("text"));

  m.def("make_pdsrf", &make_pdsrf, py::arg("config"), py::arg("schema"));
  m.def("make_rf_rtl", &make_rf_rtl, py::arg("config"), py::arg("schema"));

  py::class_<BlockMetrics>(m, "BlockMetrics")
      .def_readonly("block_index", &BlockMetrics::blockIndex)
      .def_readonly("accuracy", &BlockMetrics::accuracy)
      .def_readonly("sample_count", &BlockMetrics::sampleCount)
      .def_readonly("correct", &BlockMetrics::correct)
      .def_readonly("replacements", &BlockMetrics::replacements)
      .def_readonly("cumulative_mean_accuracy", &BlockMetrics::cumulativeMeanAccuracy);

  m.def(
      "evaluate",
      [](const std::string& model, const PdsrfConfig& config, const StreamSchema& schema,
         const std::vector<LabeledSample>& stream) {
        auto clf = make_classifier(model, config, schema);
        const auto blocks = chunk(stream, config.blockSize);
        py::gil_scoped_release release;
        return run_block_evaluation(*clf, blocks);
      },
      py::arg("model"), py::arg("config"), py::arg("schema"), py::arg("stream"),
      "Test-then-train block evaluation; returns one BlockMetrics per scored block.");
  m.def(
      "mean_accuracy", [](const std::vector<BlockMetrics>& m) { return mean_accuracy(m); }, py::arg("metrics"));
}
