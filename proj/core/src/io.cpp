#include "stormwarn/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "stormwarn/errors.hpp"
#include "stormwarn/time.hpp"
#include "stormwarn/version.hpp"

namespace stormwarn::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_digest(const json& config) {
  const std::string canonical = config.dump();  // keys sorted by default
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string output_header(const std::string& digest) {
  std::string line = "# ";
  line += kToolName;
  line += ' ';
  line += kVersion;
  line += " config=";
  line += digest;
  line += '\n';
  return line;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json manifest_json(const std::string& digest) {
  return json{{"tool", kToolName},
              {"version", kVersion},
              {"config_digest", digest}};
}

namespace {

[[noreturn]] void fail_at(const fs::path& path, int line, const std::string& msg) {
  throw InputError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

struct CsvLine {
  int number = 0;
  std::string text;
};

// Whole file minus '#' comments and blank lines.
std::vector<CsvLine> read_csv_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<CsvLine> lines;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back({number, line});
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return fields;
}

double parse_double_field(const fs::path& path, int line, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    fail_at(path, line, "not a number: '" + s + "'");
  return v;
}

std::int64_t parse_int_field(const fs::path& path, int line, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    fail_at(path, line, "not an integer: '" + s + "'");
  return v;
}

std::uint8_t parse_bit_field(const fs::path& path, int line, const std::string& s) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  fail_at(path, line, "expected 0 or 1, got '" + s + "'");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

template <typename T>
T json_get(const fs::path& path, const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end())
    throw InputError(path.string() + ": missing key '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": key '" + key + "': " + e.what());
  }
}

}  // namespace

void write_label_series(const fs::path& path, const LabelSeries& series,
                        std::span<const std::uint8_t> rain_only,
                        const std::string& digest) {
  series.validate();
  if (!rain_only.empty() && rain_only.size() != series.size())
    throw AlignmentError("rain_only column length does not match the series");
  std::ofstream out = open_out(path);
  out << output_header(digest);
  out << (rain_only.empty() ? "timestamp,value,mask\n"
                            : "timestamp,value,mask,rain_only\n");
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_iso8601_s(series.timestamps[i]) << ','
        << static_cast<int>(series.values[i]) << ','
        << static_cast<int>(series.mask[i]);
    if (!rain_only.empty()) out << ',' << static_cast<int>(rain_only[i]);
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

LabelSeriesFile read_label_series(const fs::path& path) {
  const auto lines = read_csv_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": empty label file");
  const auto header = split_fields(lines[0].text);
  bool with_rain = false;
  if (header == std::vector<std::string>{"timestamp", "value", "mask"}) {
    with_rain = false;
  } else if (header == std::vector<std::string>{"timestamp", "value", "mask",
                                                "rain_only"}) {
    with_rain = true;
  } else {
    fail_at(path, lines[0].number, "unrecognized label header");
  }

  LabelSeriesFile out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != header.size())
      fail_at(path, lines[i].number, "wrong field count");
    try {
      out.series.timestamps.push_back(parse_iso8601_s(fields[0]));
    } catch (const InputError& e) {
      fail_at(path, lines[i].number, e.what());
    }
    out.series.values.push_back(parse_bit_field(path, lines[i].number, fields[1]));
    out.series.mask.push_back(parse_bit_field(path, lines[i].number, fields[2]));
    if (with_rain)
      out.rain_only.push_back(parse_bit_field(path, lines[i].number, fields[3]));
  }
  try {
    out.series.validate();
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return out;
}

void write_strikes(const fs::path& path,
                   std::span<const LightningRecord> strikes,
                   const std::string& digest) {
  std::ofstream out = open_out(path);
  out << output_header(digest);
  out << "timestamp,lat,lon\n";
  for (const auto& s : strikes)
    out << format_iso8601_us(s.time_us) << ',' << format_double(s.lat) << ','
        << format_double(s.lon) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

std::vector<LightningRecord> read_strikes(const fs::path& path) {
  const auto lines = read_csv_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": empty strike file");
  if (split_fields(lines[0].text) !=
      std::vector<std::string>{"timestamp", "lat", "lon"})
    fail_at(path, lines[0].number, "unrecognized strike header");
  std::vector<LightningRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != 3) fail_at(path, lines[i].number, "wrong field count");
    LightningRecord rec;
    try {
      rec.time_us = parse_iso8601_us(fields[0]);
    } catch (const InputError& e) {
      fail_at(path, lines[i].number, e.what());
    }
    rec.lat = parse_double_field(path, lines[i].number, fields[1]);
    rec.lon = parse_double_field(path, lines[i].number, fields[2]);
    out.push_back(rec);
  }
  return out;
}

namespace {

json grid_sidecar_json(const RainGrid& grid, const std::string& digest) {
  return json{{"manifest", manifest_json(digest)},
              {"rows", grid.rows},
              {"cols", grid.cols},
              {"lat0", grid.lat0},
              {"lon0", grid.lon0},
              {"dlat", grid.dlat},
              {"dlon", grid.dlon},
              {"timestamp", format_iso8601_s(grid.timestamp)}};
}

RainGrid grid_from_sidecar(const fs::path& path) {
  const json j = read_json_file(path);
  RainGrid grid;
  grid.rows = json_get<int>(path, j, "rows");
  grid.cols = json_get<int>(path, j, "cols");
  grid.lat0 = json_get<double>(path, j, "lat0");
  grid.lon0 = json_get<double>(path, j, "lon0");
  grid.dlat = json_get<double>(path, j, "dlat");
  grid.dlon = json_get<double>(path, j, "dlon");
  grid.timestamp = parse_iso8601_s(json_get<std::string>(path, j, "timestamp"));
  if (grid.rows < 1 || grid.cols < 1)
    throw InputError(path.string() + ": raster dimensions must be positive");
  return grid;
}

}  // namespace

void write_rain_grid_csv(const fs::path& csv_path, const fs::path& sidecar_path,
                         const RainGrid& grid, const std::string& digest) {
  grid.validate();
  write_json_file(sidecar_path, grid_sidecar_json(grid, digest));
  std::ofstream out = open_out(csv_path);
  out << output_header(digest);
  out << "row,col,value\n";
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c)
      out << r << ',' << c << ',' << format_double(grid.at(r, c)) << '\n';
  if (!out) throw InputError("failed writing " + csv_path.string());
}

RainGrid read_rain_grid_csv(const fs::path& csv_path,
                            const fs::path& sidecar_path) {
  RainGrid grid = grid_from_sidecar(sidecar_path);
  grid.values.assign(static_cast<std::size_t>(grid.rows) *
                         static_cast<std::size_t>(grid.cols),
                     std::numeric_limits<double>::quiet_NaN());
  const auto lines = read_csv_lines(csv_path);
  if (lines.empty()) throw InputError(csv_path.string() + ": empty grid file");
  if (split_fields(lines[0].text) !=
      std::vector<std::string>{"row", "col", "value"})
    fail_at(csv_path, lines[0].number, "unrecognized grid header");
  if (lines.size() - 1 != grid.values.size())
    fail_at(csv_path, lines[0].number,
            "expected " + std::to_string(grid.values.size()) + " cells, got " +
                std::to_string(lines.size() - 1));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != 3)
      fail_at(csv_path, lines[i].number, "wrong field count");
    const std::int64_t r = parse_int_field(csv_path, lines[i].number, fields[0]);
    const std::int64_t c = parse_int_field(csv_path, lines[i].number, fields[1]);
    if (r < 0 || r >= grid.rows || c < 0 || c >= grid.cols)
      fail_at(csv_path, lines[i].number, "cell out of range");
    grid.values[static_cast<std::size_t>(r) *
                    static_cast<std::size_t>(grid.cols) +
                static_cast<std::size_t>(c)] =
        parse_double_field(csv_path, lines[i].number, fields[2]);
  }
  grid.validate();
  return grid;
}

void write_rain_grid_binary(const fs::path& bin_path,
                            const fs::path& sidecar_path, const RainGrid& grid,
                            const std::string& digest) {
  grid.validate();
  json sidecar = grid_sidecar_json(grid, digest);
  sidecar["dtype"] = "f32le";  // row-major 32-bit floats
  write_json_file(sidecar_path, sidecar);
  std::ofstream out = open_out(bin_path);
  for (double v : grid.values) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), sizeof(f));
  }
  if (!out) throw InputError("failed writing " + bin_path.string());
}

RainGrid read_rain_grid_binary(const fs::path& bin_path,
                               const fs::path& sidecar_path) {
  const json sidecar = read_json_file(sidecar_path);
  if (json_get<std::string>(sidecar_path, sidecar, "dtype") != "f32le")
    throw InputError(sidecar_path.string() + ": unsupported dtype");
  RainGrid grid = grid_from_sidecar(sidecar_path);
  const std::size_t count = static_cast<std::size_t>(grid.rows) *
                            static_cast<std::size_t>(grid.cols);
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw InputError("cannot open " + bin_path.string());
  grid.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    float f = 0.0f;
    in.read(reinterpret_cast<char*>(&f), sizeof(f));
    if (!in)
      throw InputError(bin_path.string() + ": truncated at cell " +
                       std::to_string(i));
    grid.values[i] = static_cast<double>(f);
  }
  char extra = 0;
  if (in.read(&extra, 1))
    throw InputError(bin_path.string() + ": trailing bytes after the raster");
  grid.validate();
  return grid;
}

void write_epoch_matrix(const fs::path& path, const EpochMatrix& matrix,
                        std::int64_t first_sample_id, const std::string& digest) {
  matrix.validate();
  if (matrix.n_epochs() == 0)
    throw InputError("cannot write a matrix with no epochs");
  std::ofstream out = open_out(path);
  out << output_header(digest);
  out << "sample_id";
  for (std::size_t j = 0; j < matrix.n_epochs(); ++j)
    out << ",epoch_" << (j + 1);
  out << '\n';
  for (std::size_t i = 0; i < matrix.n_samples(); ++i) {
    out << (first_sample_id + static_cast<std::int64_t>(i));
    for (std::size_t j = 0; j < matrix.n_epochs(); ++j)
      out << ',' << format_double(matrix.probs[j][i]);
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

EpochMatrixFile read_epoch_matrix(const fs::path& path) {
  const auto lines = read_csv_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": empty matrix file");
  const auto header = split_fields(lines[0].text);
  if (header.size() < 2 || header[0] != "sample_id")
    fail_at(path, lines[0].number, "unrecognized matrix header");
  const std::size_t n_epochs = header.size() - 1;
  for (std::size_t j = 0; j < n_epochs; ++j)
    if (header[j + 1] != "epoch_" + std::to_string(j + 1))
      fail_at(path, lines[0].number, "epoch columns must be epoch_1..epoch_N");

  EpochMatrixFile out;
  out.matrix.probs.assign(n_epochs, {});
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != header.size())
      fail_at(path, lines[i].number, "wrong field count");
    out.sample_ids.push_back(parse_int_field(path, lines[i].number, fields[0]));
    for (std::size_t j = 0; j < n_epochs; ++j) {
      const double p = parse_double_field(path, lines[i].number, fields[j + 1]);
      if (!(p >= 0.0 && p <= 1.0))
        fail_at(path, lines[i].number, "probability outside [0,1]");
      out.matrix.probs[j].push_back(p);
    }
  }
  return out;
}

void MatrixManifest::validate() const {
  if (runs < 1 || epochs < 1)
    throw InputError("matrix manifest needs runs >= 1 and epochs >= 1");
  if (files.size() != static_cast<std::size_t>(runs))
    throw InputError("matrix manifest run count does not match its file list");
  if (train_begin >= train_end || validation_begin >= validation_end ||
      test_begin >= test_end)
    throw InputError("matrix manifest split ranges must be nonempty");
  if (train_end > validation_begin || validation_end > test_begin)
    throw InputError("matrix manifest splits must be ordered and disjoint");
}

void write_matrix_manifest(const fs::path& path, const MatrixManifest& manifest,
                           const std::string& digest) {
  manifest.validate();
  json files = json::array();
  for (std::size_t k = 0; k < manifest.files.size(); ++k)
    files.push_back(json{{"run", k + 1},
                         {"train", manifest.files[k].train},
                         {"validation", manifest.files[k].validation},
                         {"test", manifest.files[k].test}});
  json j{
      {"manifest", manifest_json(digest)},
      {"runs", manifest.runs},
      {"epochs", manifest.epochs},
      {"seed", manifest.seed},
      {"labels", manifest.labels_path},
      {"splits",
       json{{"train", json::array({manifest.train_begin, manifest.train_end})},
            {"validation", json::array({manifest.validation_begin,
                                        manifest.validation_end})},
            {"test", json::array({manifest.test_begin, manifest.test_end})}}},
      {"files", files}};
  if (!manifest.config.empty()) j["config"] = manifest.config;
  write_json_file(path, j);
}

MatrixManifest read_matrix_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  MatrixManifest m;
  m.runs = json_get<int>(path, j, "runs");
  m.epochs = json_get<int>(path, j, "epochs");
  m.seed = json_get<std::uint64_t>(path, j, "seed");
  m.labels_path = json_get<std::string>(path, j, "labels");
  const json splits = json_get<json>(path, j, "splits");
  auto range = [&](const char* name, std::size_t& begin, std::size_t& end) {
    const json r = json_get<json>(path, splits, name);
    if (!r.is_array() || r.size() != 2)
      throw InputError(path.string() + ": split '" + name +
                       "' must be [begin, end)");
    begin = r[0].get<std::size_t>();
    end = r[1].get<std::size_t>();
  };
  range("train", m.train_begin, m.train_end);
  range("validation", m.validation_begin, m.validation_end);
  range("test", m.test_begin, m.test_end);
  const json files = json_get<json>(path, j, "files");
  if (!files.is_array())
    throw InputError(path.string() + ": 'files' must be an array");
  m.files.resize(files.size());
  for (const json& f : files) {
    const auto run = json_get<std::size_t>(path, f, "run");
    if (run < 1 || run > m.files.size())
      throw InputError(path.string() + ": file entry run index out of range");
    m.files[run - 1].train = json_get<std::string>(path, f, "train");
    m.files[run - 1].validation = json_get<std::string>(path, f, "validation");
    m.files[run - 1].test = json_get<std::string>(path, f, "test");
  }
  if (j.contains("config")) m.config = j["config"];
  m.validate();
  return m;
}

void write_features(const fs::path& path, const Eigen::MatrixXd& features,
                    std::span<const std::int64_t> timestamps,
                    const std::string& digest) {
  if (static_cast<std::size_t>(features.rows()) != timestamps.size())
    throw AlignmentError("feature rows and timestamps differ in count");
  std::ofstream out = open_out(path);
  out << output_header(digest);
  out << "timestamp";
  for (Eigen::Index m = 0; m < features.cols(); ++m) out << ",f" << (m + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out << format_iso8601_s(timestamps[static_cast<std::size_t>(i)]);
    for (Eigen::Index m = 0; m < features.cols(); ++m)
      out << ',' << format_double(features(i, m));
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

FeatureFile read_features(const fs::path& path) {
  const auto lines = read_csv_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": empty feature file");
  const auto header = split_fields(lines[0].text);
  if (header.size() < 2 || header[0] != "timestamp")
    fail_at(path, lines[0].number, "unrecognized feature header");
  for (std::size_t m = 1; m < header.size(); ++m)
    if (header[m] != "f" + std::to_string(m))
      fail_at(path, lines[0].number, "feature columns must be f1..fD");
  const Eigen::Index dims = static_cast<Eigen::Index>(header.size() - 1);

  FeatureFile out;
  out.features.resize(static_cast<Eigen::Index>(lines.size() - 1), dims);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != header.size())
      fail_at(path, lines[i].number, "wrong field count");
    try {
      out.timestamps.push_back(parse_iso8601_s(fields[0]));
    } catch (const InputError& e) {
      fail_at(path, lines[i].number, e.what());
    }
    for (Eigen::Index m = 0; m < dims; ++m)
      out.features(static_cast<Eigen::Index>(i - 1), m) = parse_double_field(
          path, lines[i].number, fields[static_cast<std::size_t>(m + 1)]);
  }
  return out;
}

void write_decision(const fs::path& path, const DecisionFile& file,
                    const std::string& digest) {
  const EnsembleDecision& d = file.decision;
  if (d.test_prediction.size() != d.test_timestamps.size())
    throw AlignmentError("decision predictions and timestamps differ in length");
  json epochs = json::array();
  for (int j : d.epochs) epochs.push_back(j + 1);  // 1-based on disk
  json thresholds = json::array();
  for (double t : d.thresholds) thresholds.push_back(t);
  json timestamps = json::array();
  for (std::int64_t t : d.test_timestamps)
    timestamps.push_back(format_iso8601_s(t));
  json predicted = json::array();
  for (std::uint8_t v : d.test_prediction.values)
    predicted.push_back(static_cast<int>(v));
  const json j{{"manifest", manifest_json(digest)},
               {"selection_score", file.selection_score},
               {"run_score", file.run_score},
               {"window_T", file.window_T},
               {"chosen_run", d.chosen_run + 1},  // 1-based on disk
               {"gamma", d.gamma},
               {"alpha", d.alpha},
               {"epochs", epochs},
               {"thresholds", thresholds},
               {"validation_run_score", d.validation_run_score},
               {"test", json{{"timestamps", timestamps},
                             {"predicted", predicted}}}};
  write_json_file(path, j);
}

DecisionFile read_decision(const fs::path& path) {
  const json j = read_json_file(path);
  DecisionFile file;
  file.selection_score = json_get<std::string>(path, j, "selection_score");
  file.run_score = json_get<std::string>(path, j, "run_score");
  file.window_T = json_get<int>(path, j, "window_T");
  EnsembleDecision& d = file.decision;
  d.chosen_run = json_get<int>(path, j, "chosen_run") - 1;
  if (d.chosen_run < 0)
    throw InputError(path.string() + ": chosen_run must be >= 1");
  d.gamma = json_get<double>(path, j, "gamma");
  d.alpha = json_get<double>(path, j, "alpha");
  for (const json& e : json_get<json>(path, j, "epochs")) {
    const int epoch = e.get<int>();
    if (epoch < 1) throw InputError(path.string() + ": epochs must be >= 1");
    d.epochs.push_back(epoch - 1);
  }
  for (const json& t : json_get<json>(path, j, "thresholds"))
    d.thresholds.push_back(t.get<double>());
  d.validation_run_score = json_get<double>(path, j, "validation_run_score");
  const json test = json_get<json>(path, j, "test");
  for (const json& t : json_get<json>(path, test, "timestamps"))
    d.test_timestamps.push_back(parse_iso8601_s(t.get<std::string>()));
  for (const json& p : json_get<json>(path, test, "predicted")) {
    const int v = p.get<int>();
    if (v != 0 && v != 1)
      throw InputError(path.string() + ": predictions must be 0 or 1");
    d.test_prediction.values.push_back(static_cast<std::uint8_t>(v));
  }
  if (d.test_prediction.size() != d.test_timestamps.size())
    throw InputError(path.string() +
                     ": test timestamps and predictions differ in length");
  return file;
}

json score_report_json(const ScoreTable& plain, const ScoreTable& weighted,
                       int window_T) {
  auto value_or_null = [](Score s, const ScoreTable& t) -> json {
    try {
      return score_value(s, t);
    } catch (const UndefinedScoreError&) {
      return nullptr;
    }
  };
  return json{{"tn", plain.tn},
              {"fp", plain.fp},
              {"fn", plain.fn},
              {"tp", plain.tp},
              {"tss", value_or_null(Score::tss, plain)},
              {"csi", value_or_null(Score::csi, plain)},
              {"wfp", weighted.fp},
              {"wfn", weighted.fn},
              {"wtss", value_or_null(Score::wtss, weighted)},
              {"wcsi", value_or_null(Score::wcsi, weighted)},
              {"T", window_T}};
}

void write_score_report(const fs::path& path, const ScoreTable& plain,
                        const ScoreTable& weighted, int window_T,
                        const std::string& digest) {
  json j = score_report_json(plain, weighted, window_T);
  j["manifest"] = manifest_json(digest);
  write_json_file(path, j);
}

void write_timeline(const fs::path& path, const LabelSeries& actual,
                    std::span<const std::uint8_t> rain_only,
                    const PredictionSeries& predicted,
                    const std::string& digest) {
  actual.validate();
  if (predicted.size() != actual.size())
    throw AlignmentError("timeline prediction and labels differ in length");
  if (!rain_only.empty() && rain_only.size() != actual.size())
    throw AlignmentError("timeline rain_only column differs in length");
  std::ofstream out = open_out(path);
  out << output_header(digest);
  out << "timestamp,actual,rain_only,predicted,masked\n";
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const int rain = rain_only.empty() ? 0 : rain_only[i];
    out << format_iso8601_s(actual.timestamps[i]) << ','
        << static_cast<int>(actual.values[i]) << ',' << rain << ','
        << static_cast<int>(predicted.values[i]) << ','
        << (actual.mask[i] ? 0 : 1) << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

void write_param_snapshots(const fs::path& bin_path,
                           const fs::path& manifest_path,
                           std::span<const ToyClassifierParams> snapshots,
                           std::uint64_t seed, const std::string& digest) {
  if (snapshots.empty()) throw InputError("no parameter snapshots to write");
  const Eigen::Index h = snapshots[0].W1.rows();
  const Eigen::Index d = snapshots[0].W1.cols();
  for (const auto& p : snapshots)
    if (p.W1.rows() != h || p.W1.cols() != d || p.b1.size() != h ||
        p.w2.size() != h)
      throw AlignmentError("snapshots disagree on parameter shapes");

  std::ofstream out = open_out(bin_path);
  auto put = [&](double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  for (const auto& p : snapshots) {
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c = 0; c < d; ++c) put(p.W1(r, c));
    for (Eigen::Index r = 0; r < h; ++r) put(p.b1(r));
    for (Eigen::Index r = 0; r < h; ++r) put(p.w2(r));
    put(p.b2);
  }
  if (!out) throw InputError("failed writing " + bin_path.string());

  const json j{{"manifest", manifest_json(digest)},
               {"seed", seed},
               {"epochs", snapshots.size()},
               {"hidden", h},
               {"features", d},
               {"dtype", "f64le"},
               {"layout", "W1,b1,w2,b2"},
               {"bin", bin_path.filename().string()}};
  write_json_file(manifest_path, j);
}

std::vector<ToyClassifierParams> read_param_snapshots(
    const fs::path& bin_path, const fs::path& manifest_path) {
  const json j = read_json_file(manifest_path);
  if (json_get<std::string>(manifest_path, j, "dtype") != "f64le" ||
      json_get<std::string>(manifest_path, j, "layout") != "W1,b1,w2,b2")
    throw InputError(manifest_path.string() + ": unsupported snapshot layout");
  const auto epochs = json_get<std::size_t>(manifest_path, j, "epochs");
  const auto h = json_get<Eigen::Index>(manifest_path, j, "hidden");
  const auto d = json_get<Eigen::Index>(manifest_path, j, "features");
  if (epochs < 1 || h < 1 || d < 1)
    throw InputError(manifest_path.string() + ": invalid snapshot shapes");

  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw InputError("cannot open " + bin_path.string());
  auto get = [&]() {
    double v = 0.0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw InputError(bin_path.string() + ": truncated snapshot data");
    return v;
  };
  std::vector<ToyClassifierParams> out(epochs);
  for (auto& p : out) {
    p.W1.resize(h, d);
    p.b1.resize(h);
    p.w2.resize(h);
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c = 0; c < d; ++c) p.W1(r, c) = get();
    for (Eigen::Index r = 0; r < h; ++r) p.b1(r) = get();
    for (Eigen::Index r = 0; r < h; ++r) p.w2(r) = get();
    p.b2 = get();
  }
  char extra = 0;
  if (in.read(&extra, 1))
    throw InputError(bin_path.string() + ": trailing bytes after snapshots");
  return out;
}

}  // namespace stormwarn::io
