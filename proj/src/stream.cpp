#include "pdsrf/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string_view>

#include "pdsrf/errors.hpp"

namespace pdsrf {

void StreamSchema::validate() const {
  if (numFeatures < 1) throw ConfigError("schema needs at least one attribute");
  if (numClasses < 2) throw ConfigError("schema needs at least two classes");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

// Splits on commas and parses every field. Returns false if any field is
// not a finite number.
bool parse_row(std::string_view line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    double v = 0;
    if (!parse_double(field, v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return true;
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::size_t resolve_label_column(int labelColumn, std::size_t numColumns, std::size_t lineNo) {
  if (labelColumn < 0) return numColumns - 1;
  if (static_cast<std::size_t>(labelColumn) >= numColumns)
    throw ParseError("label column " + std::to_string(labelColumn) + " out of range", lineNo);
  return static_cast<std::size_t>(labelColumn);
}

int integral_label(double v, std::size_t lineNo) {
  if (v != std::floor(v) || std::fabs(v) > std::numeric_limits<int>::max())
    throw ParseError("label is not an integer", lineNo);
  return static_cast<int>(v);
}

}  // namespace

StreamSchema scan_csv_schema(const std::filesystem::path& path, int labelColumn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  StreamSchema schema;
  schema.labelColumn = labelColumn;
  std::string line;
  std::vector<double> row;
  std::size_t lineNo = 0, columns = 0;
  int minLabel = std::numeric_limits<int>::max(), maxLabel = std::numeric_limits<int>::min();
  bool sawData = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (blank(line)) continue;
    if (!parse_row(line, row)) {
      if (lineNo == 1) continue;  // header
      throw ParseError("malformed row", lineNo);
    }
    if (!sawData) {
      columns = row.size();
      if (columns < 2) throw ParseError("need at least one attribute and a label", lineNo);
      sawData = true;
    } else if (row.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(row.size()),
                       lineNo);
    }
    int label = integral_label(row[resolve_label_column(labelColumn, columns, lineNo)], lineNo);
    minLabel = std::min(minLabel, label);
    maxLabel = std::max(maxLabel, label);
  }
  if (!sawData) return schema;
  schema.numFeatures = columns - 1;
  if (minLabel < 0) throw ParseError("negative labels are not supported", lineNo);
  schema.labelBase = minLabel >= 1 ? 1 : 0;
  schema.numClasses = std::max<std::size_t>(2, static_cast<std::size_t>(maxLabel - schema.labelBase + 1));
  return schema;
}

CsvReader::CsvReader(const std::filesystem::path& path, StreamSchema schema)
    : in_(path), schema_(schema) {
  if (!in_) throw std::runtime_error("cannot open " + path.string());
}

std::optional<LabeledSample> CsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++lineNo_;
    if (blank(line)) continue;
    const bool first = first_;
    first_ = false;
    if (!parse_row(line, row_)) {
      if (first) continue;
      throw ParseError("malformed row", lineNo_);
    }
    if (schema_.numFeatures == 0) schema_.numFeatures = row_.size() - 1;
    if (row_.size() != schema_.numFeatures + 1)
      throw ParseError("expected " + std::to_string(schema_.numFeatures + 1) + " fields, got " +
                           std::to_string(row_.size()),
                       lineNo_);
    const std::size_t labelCol = resolve_label_column(schema_.labelColumn, row_.size(), lineNo_);
    const int raw = integral_label(row_[labelCol], lineNo_);
    const int label = raw - schema_.labelBase;
    if (label < 0 || static_cast<std::size_t>(label) >= schema_.numClasses)
      throw ParseError("label " + std::to_string(raw) + " outside declared range [" +
                           std::to_string(schema_.labelBase) + ", " +
                           std::to_string(schema_.labelBase + static_cast<int>(schema_.numClasses)) + ")",
                       lineNo_);
    LabeledSample s;
    s.id = nextId_++;
    s.label = label;
    s.features.reserve(schema_.numFeatures);
    for (std::size_t c = 0; c < row_.size(); ++c)
      if (c != labelCol) s.features.push_back(row_[c]);
    return s;
  }
  return std::nullopt;
}

std::vector<LabeledSample> read_csv_stream(const std::filesystem::path& path, const StreamSchema& schema) {
  CsvReader reader(path, schema);
  std::vector<LabeledSample> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<LabeledSample>& samples, bool header) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  if (header && !samples.empty()) {
    for (std::size_t j = 0; j < samples.front().features.size(); ++j) std::fprintf(f, "x%zu,", j);
    std::fprintf(f, "label\n");
  }
  for (const auto& s : samples) {
    for (double v : s.features) std::fprintf(f, "%.17g,", v);
    std::fprintf(f, "%d\n", s.label);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

void DriftStreamSpec::validate() const {
  if (numFeatures < 1) throw ConfigError("generator needs at least one attribute");
  if (numClasses < 2) throw ConfigError("generator needs at least two classes");
  if (!(noise >= 0.0 && noise < 1.0)) throw ConfigError("noise rate must lie in [0, 1)");
  if (drift == DriftKind::gradual && driftStart > driftEnd)
    throw ConfigError("gradual drift window start exceeds its end");
}

DriftKind parse_drift_kind(const std::string& s) {
  if (s == "none") return DriftKind::none;
  if (s == "sudden") return DriftKind::sudden;
  if (s == "gradual") return DriftKind::gradual;
  throw ConfigError("unknown drift kind '" + s + "'");
}

std::string to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::none: return "none";
    case DriftKind::sudden: return "sudden";
    case DriftKind::gradual: return "gradual";
  }
  return "none";
}

DriftStreamGenerator::Concept DriftStreamGenerator::make_concept(Rng& rng, const Concept* from) const {
  Concept c;
  std::normal_distribution<double> normal;
  c.direction.resize(spec_.numFeatures);
  double norm = 0;
  do {
    for (double& w : c.direction) w = normal(rng);
    if (from) {
      // B is A rotated by 90 degrees in a random plane; with one feature the
      // only rotation left is a flip.
      if (spec_.numFeatures == 1) {
        c.direction[0] = -from->direction[0];
      } else {
        double dot = 0;
        for (std::size_t j = 0; j < c.direction.size(); ++j) dot += c.direction[j] * from->direction[j];
        for (std::size_t j = 0; j < c.direction.size(); ++j) c.direction[j] -= dot * from->direction[j];
      }
    }
    norm = 0;
    for (double w : c.direction) norm += w * w;
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& w : c.direction) w /= norm;

  if (spec_.numClasses == 2) {
    c.cuts = {0.0};
    return c;
  }
  // Equal-mass cuts from the empirical projection distribution.
  constexpr std::size_t kDraws = 20000;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> proj(kDraws);
  for (double& p : proj) {
    p = 0;
    for (double w : c.direction) p += w * (unit(rng) - 0.5);
  }
  std::sort(proj.begin(), proj.end());
  for (std::size_t j = 1; j < spec_.numClasses; ++j) c.cuts.push_back(proj[j * kDraws / spec_.numClasses]);
  return c;
}

DriftStreamGenerator::DriftStreamGenerator(DriftStreamSpec spec, std::uint64_t seed)
    : spec_(spec),
      featureRng_(derive_seed(seed, {1})),
      labelRng_(derive_seed(seed, {2})) {
  spec_.validate();
  schema_.numFeatures = spec_.numFeatures;
  schema_.numClasses = spec_.numClasses;
  Rng conceptRng(derive_seed(seed, {0}));
  concepts_[0] = make_concept(conceptRng, nullptr);
  concepts_[1] = make_concept(conceptRng, &concepts_[0]);
}

int DriftStreamGenerator::concept_label(int which, const std::vector<double>& features) const {
  const Concept& c = concepts_[which];
  double p = 0;
  for (std::size_t j = 0; j < c.direction.size(); ++j) p += c.direction[j] * (features[j] - 0.5);
  return static_cast<int>(std::upper_bound(c.cuts.begin(), c.cuts.end(), p) - c.cuts.begin());
}

double DriftStreamGenerator::concept_b_probability(std::size_t pos) const {
  switch (spec_.drift) {
    case DriftKind::none: return 0.0;
    case DriftKind::sudden: return pos >= spec_.driftStart ? 1.0 : 0.0;
    case DriftKind::gradual:
      if (pos < spec_.driftStart) return 0.0;
      if (pos >= spec_.driftEnd) return 1.0;
      return static_cast<double>(pos - spec_.driftStart) / static_cast<double>(spec_.driftEnd - spec_.driftStart);
  }
  return 0.0;
}

std::optional<LabeledSample> DriftStreamGenerator::next() {
  if (pos_ >= spec_.numSamples) return std::nullopt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LabeledSample s;
  s.id = pos_;
  s.features.resize(spec_.numFeatures);
  for (double& v : s.features) v = unit(featureRng_);

  // Fixed draw pattern per sample keeps streams aligned across drift settings.
  const double conceptDraw = unit(labelRng_);
  const double noiseDraw = unit(labelRng_);
  const auto otherClass = static_cast<int>(labelRng_() % (spec_.numClasses - 1));

  const int active = conceptDraw < concept_b_probability(pos_) ? 1 : 0;
  int label = concept_label(active, s.features);
  if (noiseDraw < spec_.noise) label = otherClass >= label ? otherClass + 1 : otherClass;
  s.label = label;
  ++pos_;
  return s;
}

std::vector<LabeledSample> generate_drift_stream(const DriftStreamSpec& spec, std::uint64_t seed) {
  DriftStreamGenerator gen(spec, seed);
  std::vector<LabeledSample> out;
  out.reserve(spec.numSamples);
  while (auto s = gen.next()) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Block> chunk(const std::vector<LabeledSample>& stream, std::size_t blockSize) {
  if (blockSize < 1) throw ConfigError("blockSize must be at least 1");
  std::vector<Block> blocks;
  blocks.reserve((stream.size() + blockSize - 1) / blockSize);
  for (std::size_t start = 0; start < stream.size(); start += blockSize) {
    Block b;
    b.index = blocks.size();
    const std::size_t end = std::min(stream.size(), start + blockSize);
    b.samples.assign(stream.begin() + static_cast<std::ptrdiff_t>(start),
                     stream.begin() + static_cast<std::ptrdiff_t>(end));
    for (auto& s : b.samples) s.arrivalBlock = static_cast<std::int64_t>(b.index);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

BlockReader::BlockReader(SampleSource& source, std::size_t blockSize) : source_(source), blockSize_(blockSize) {
  if (blockSize < 1) throw ConfigError("blockSize must be at least 1");
}

std::optional<Block> BlockReader::next() {
  Block b;
  b.index = nextIndex_;
  b.samples.reserve(blockSize_);
  while (b.samples.size() < blockSize_) {
    auto s = source_.next();
    if (!s) break;
    s->arrivalBlock = static_cast<std::int64_t>(b.index);
    b.samples.push_back(std::move(*s));
  }
  if (b.samples.empty()) return std::nullopt;
  ++nextIndex_;
  return b;
}

}  // namespace pdsrf
