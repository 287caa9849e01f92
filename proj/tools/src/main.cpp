#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stormwarn/ensemble.hpp"
#include "stormwarn/errors.hpp"
#include "stormwarn/io.hpp"
#include "stormwarn/labeling.hpp"
#include "stormwarn/rng.hpp"
#include "stormwarn/synth.hpp"
#include "stormwarn/time.hpp"
#include "stormwarn/train.hpp"
#include "stormwarn/verify.hpp"
#include "stormwarn/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stormwarn;

namespace {

// Config files are JSON: one object per subcommand, keys mirroring the long
// flags. CLI11 applies file values only to options absent from the command
// line, so flags always win.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json parsed;
    try {
      parsed = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConfigError(std::string("config file: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(parsed, {}, items);
    return items;
  }

 private:
  static void flatten(const json& node, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    if (!node.is_object())
      throw CLI::ConfigError("config file: expected an object at " +
                             (parents.empty() ? std::string("the top level")
                                              : CLI::detail::join(parents, ".")));
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, std::move(nested), items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const json& element : value) item.inputs.push_back(scalar(element));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& value) {
    return value.is_string() ? value.get<std::string>() : value.dump();
  }
};

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      return parts;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::size_t parse_index(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw InputError(std::string(what) + ": '" + std::string(text) +
                     "' is not a nonnegative integer");
  return value;
}

double parse_real(std::string_view text, std::string_view what) {
  const std::string s(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": '" + s + "' is not a number");
  }
}

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
};

Range parse_range(const std::string& text, std::string_view what) {
  const auto parts = split_on(text, ':');
  if (parts.size() != 2)
    throw InputError(std::string(what) + ": expected begin:end, got '" + text + "'");
  const Range r{parse_index(parts[0], what), parse_index(parts[1], what)};
  if (r.end <= r.begin)
    throw InputError(std::string(what) + ": empty range '" + text + "'");
  return r;
}

GammaGrid parse_gamma_grid(const std::string& text) {
  const auto parts = split_on(text, ':');
  if (parts.size() != 3)
    throw InputError("--gamma-grid: expected start:stop:step, got '" + text + "'");
  GammaGrid grid;
  grid.start = parse_real(parts[0], "--gamma-grid start");
  grid.stop = parse_real(parts[1], "--gamma-grid stop");
  grid.step = parse_real(parts[2], "--gamma-grid step");
  grid.validate();
  return grid;
}

ThresholdGrid parse_threshold_grid(const std::string& text) {
  if (text == "unique") return {};
  const auto parts = split_on(text, ':');
  if (parts.size() == 2 && parts[0] == "uniform") {
    ThresholdGrid grid;
    grid.kind = ThresholdGrid::Kind::uniform;
    grid.uniform_count =
        static_cast<int>(parse_index(parts[1], "--thresholds count"));
    grid.validate();
    return grid;
  }
  throw InputError("--thresholds: expected 'unique' or 'uniform:<count>', got '" +
                   text + "'");
}

Connectivity parse_connectivity(const std::string& text) {
  if (text == "four") return Connectivity::four;
  if (text == "eight") return Connectivity::eight;
  throw InputError("--connectivity: expected 'four' or 'eight', got '" + text + "'");
}

void append_series(LabelSeries& dst, const LabelSeries& src) {
  dst.values.insert(dst.values.end(), src.values.begin(), src.values.end());
  dst.timestamps.insert(dst.timestamps.end(), src.timestamps.begin(),
                        src.timestamps.end());
  dst.mask.insert(dst.mask.end(), src.mask.begin(), src.mask.end());
}

std::string run_stem(int k) { return "run_" + std::to_string(k + 1); }

std::string run_file_name(int k, const char* split) {
  return run_stem(k) + "_" + split + ".csv";
}

std::string scene_stem(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "grid_%04d", i);
  return buf;
}

struct SynthEventsOpts {
  std::uint64_t seed = 0;
  std::size_t length = 7128;
  double event_rate = 105.0 / 7128.0;
  double persistence = 0.5;
  std::string out;

  int run() const {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.length = length;
    cfg.base_event_rate = event_rate;
    cfg.persistence = persistence;
    cfg.validate();
    const json c{{"command", "synth events"}, {"seed", seed},
                 {"length", length},          {"event_rate", event_rate},
                 {"persistence", persistence}};
    io::write_label_series(out, generate_event_stream(cfg), {},
                           io::config_digest(c));
    std::cout << "wrote " << length << " hourly labels to " << out << '\n';
    return kExitOk;
  }
};

struct SynthFeaturesOpts {
  std::string labels;
  int dims = 8;
  std::uint64_t seed = 0;
  double skill = 2.0;
  std::string out;

  int run() const {
    const io::LabelSeriesFile file = io::read_label_series(labels);
    if (file.series.size() == 0)
      throw InputError(labels + ": cannot derive features from an empty series");
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.skill = skill;
    cfg.length = file.series.size();
    const Eigen::MatrixXd features = generate_features(file.series, dims, cfg);
    const json c{{"command", "synth features"}, {"labels", labels},
                 {"dims", dims},                {"seed", seed},
                 {"skill", skill}};
    io::write_features(out, features, file.series.timestamps,
                       io::config_digest(c));
    std::cout << "wrote " << file.series.size() << "x" << dims
              << " features to " << out << '\n';
    return kExitOk;
  }
};

struct SynthProbsOpts {
  std::uint64_t seed = 0;
  int runs = 3;
  int epochs = 16;
  std::size_t train_len = 7128;
  std::size_t validation_len = 1296;
  std::size_t test_len = 1899;
  double event_rate = 105.0 / 7128.0;
  double persistence = 0.5;
  double skill = 2.0;
  double noise = 0.6;
  double quality_min = 0.75;
  double quality_max = 1.25;
  std::string out_dir;

  int run() const {
    StudyConfig sc;
    sc.base.seed = seed;
    sc.base.base_event_rate = event_rate;
    sc.base.persistence = persistence;
    sc.base.skill = skill;
    sc.base.noise_per_epoch = noise;
    sc.train_len = train_len;
    sc.validation_len = validation_len;
    sc.test_len = test_len;
    sc.epochs = epochs;
    sc.runs = runs;
    sc.run_quality_min = quality_min;
    sc.run_quality_max = quality_max;
    sc.validate();
    const SyntheticStudy study = generate_study(sc);

    const json c{{"command", "synth probs"},
                 {"seed", seed},
                 {"runs", runs},
                 {"epochs", epochs},
                 {"train_len", train_len},
                 {"validation_len", validation_len},
                 {"test_len", test_len},
                 {"event_rate", event_rate},
                 {"persistence", persistence},
                 {"skill", skill},
                 {"noise", noise},
                 {"quality_min", quality_min},
                 {"quality_max", quality_max}};
    const std::string digest = io::config_digest(c);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    LabelSeries full = study.labels.train;
    append_series(full, study.labels.validation);
    append_series(full, study.labels.test);
    io::write_label_series(dir / "labels.csv", full, {}, digest);

    io::MatrixManifest m;
    m.runs = runs;
    m.epochs = epochs;
    m.seed = seed;
    m.labels_path = "labels.csv";
    m.train_begin = 0;
    m.train_end = train_len;
    m.validation_begin = train_len;
    m.validation_end = train_len + validation_len;
    m.test_begin = m.validation_end;
    m.test_end = m.validation_end + test_len;
    m.config = json{{"source", "synthetic"},
                    {"event_rate", event_rate},
                    {"persistence", persistence},
                    {"skill", skill},
                    {"noise_per_epoch", noise},
                    {"run_quality", json::array({quality_min, quality_max})}};
    for (int k = 0; k < runs; ++k) {
      io::MatrixManifest::RunFiles f{run_file_name(k, "train"),
                                     run_file_name(k, "validation"),
                                     run_file_name(k, "test")};
      io::write_epoch_matrix(dir / f.train, study.runs[k].train, 0, digest);
      io::write_epoch_matrix(dir / f.validation, study.runs[k].validation,
                             static_cast<std::int64_t>(m.validation_begin),
                             digest);
      io::write_epoch_matrix(dir / f.test, study.runs[k].test,
                             static_cast<std::int64_t>(m.test_begin), digest);
      m.files.push_back(std::move(f));
    }
    io::write_matrix_manifest(dir / "matrix_manifest.json", m, digest);
    std::cout << "wrote " << runs << " runs x " << epochs
              << " epochs of probabilities to " << out_dir << '\n';
    return kExitOk;
  }
};

struct SynthScenesOpts {
  std::uint64_t seed = 0;
  int count = 24;
  std::string category = "mixed";
  int rows = 24;
  int cols = 32;
  double missing_rate = 0.02;
  std::string out_dir;

  int run() const {
    if (category != "mixed") (void)parse_scene_category(category);
    if (count < 1) throw InputError("--count must be positive");
    const json c{{"command", "synth scenes"}, {"seed", seed},
                 {"count", count},            {"category", category},
                 {"rows", rows},              {"cols", cols},
                 {"missing_rate", missing_rate}};
    const std::string digest = io::config_digest(c);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    constexpr SceneCategory kCycle[] = {
        SceneCategory::qualifying, SceneCategory::rain_only,
        SceneCategory::isolated_pixel, SceneCategory::null_scene};
    std::vector<LightningRecord> strikes;
    LabelSeries truth;
    std::vector<std::uint8_t> rain_only;
    for (int i = 0; i < count; ++i) {
      SceneConfig sc;
      sc.seed = child_seed(seed, "scene/" + std::to_string(i));
      sc.category =
          category == "mixed" ? kCycle[i % 4] : parse_scene_category(category);
      sc.rows = rows;
      sc.cols = cols;
      sc.missing_rate = missing_rate;
      // Two-hour spacing keeps one scene's off-hour decoy bursts outside
      // every other scene's labeling window.
      sc.timestamp =
          kSynthStartTimestamp + static_cast<std::int64_t>(i) * 2 * kHourSeconds;
      sc.validate();
      const Scene scene = generate_rain_lightning_scene(sc);
      const std::string stem = scene_stem(i);
      if (i % 2 == 0)
        io::write_rain_grid_csv(dir / (stem + ".csv"), dir / (stem + ".json"),
                                scene.grid, digest);
      else
        io::write_rain_grid_binary(dir / (stem + ".bin"), dir / (stem + ".json"),
                                   scene.grid, digest);
      strikes.insert(strikes.end(), scene.strikes.begin(), scene.strikes.end());
      truth.values.push_back(scene.expected.label);
      truth.timestamps.push_back(sc.timestamp);
      truth.mask.push_back(1);
      rain_only.push_back(scene.expected.rain_only ? 1 : 0);
    }
    std::sort(strikes.begin(), strikes.end(),
              [](const LightningRecord& a, const LightningRecord& b) {
                return std::tie(a.time_us, a.lat, a.lon) <
                       std::tie(b.time_us, b.lat, b.lon);
              });
    io::write_strikes(dir / "strikes.csv", strikes, digest);
    io::write_label_series(dir / "truth.csv", truth, rain_only, digest);
    std::cout << "wrote " << count << " scenes to " << out_dir << '\n';
    return kExitOk;
  }
};

struct LabelOpts {
  std::string rain_dir;
  std::string strikes_file;
  double thresh = 50.0;
  int min_size = 3;
  std::string connectivity = "four";
  double radius_km = 5.0;
  int window_min = 10;
  int min_count = 10;
  std::string out;

  int run() const {
    LabelParams params;
    params.thresh_mm_h = thresh;
    params.min_size = min_size;
    params.connectivity = parse_connectivity(connectivity);
    params.radius_km = radius_km;
    params.window_min = window_min;
    params.min_count = min_count;
    params.validate();
    const json c{{"command", "label"},
                 {"rain_dir", rain_dir},
                 {"strikes", strikes_file},
                 {"thresh", thresh},
                 {"min_size", min_size},
                 {"connectivity", connectivity},
                 {"radius_km", radius_km},
                 {"window_min", window_min},
                 {"min_count", min_count}};
    const std::string digest = io::config_digest(c);

    if (!fs::is_directory(rain_dir))
      throw InputError("--rain-dir: '" + rain_dir + "' is not a directory");
    // Grids travel as payload + JSON sidecar sharing a stem; a dtype key in
    // the sidecar marks a binary payload.
    std::vector<RainGrid> grids;
    for (const auto& entry : fs::directory_iterator(rain_dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".json")
        continue;
      json sidecar;
      {
        std::ifstream in(entry.path());
        try {
          sidecar = json::parse(in);
        } catch (const json::parse_error& e) {
          throw InputError(entry.path().string() + ": " + e.what());
        }
      }
      if (!sidecar.is_object() || !sidecar.contains("rows") ||
          !sidecar.contains("cols"))
        continue;
      fs::path payload = entry.path();
      if (sidecar.contains("dtype")) {
        payload.replace_extension(".bin");
        grids.push_back(io::read_rain_grid_binary(payload, entry.path()));
      } else {
        payload.replace_extension(".csv");
        grids.push_back(io::read_rain_grid_csv(payload, entry.path()));
      }
    }
    if (grids.empty()) {
      std::cerr << "warning: no rain grids under " << rain_dir
                << ", writing an empty label file\n";
      io::write_label_series(out, LabelSeries{}, {}, digest);
      return kExitOk;
    }
    std::sort(grids.begin(), grids.end(),
              [](const RainGrid& a, const RainGrid& b) {
                return a.timestamp < b.timestamp;
              });
    const std::int64_t t0 = grids.front().timestamp;
    for (std::size_t i = 0; i < grids.size(); ++i) {
      if (i > 0 && grids[i].timestamp == grids[i - 1].timestamp)
        throw InputError("two rain grids share timestamp " +
                         format_iso8601_s(grids[i].timestamp));
      if ((grids[i].timestamp - t0) % kHourSeconds != 0)
        throw InputError("rain grids must sit on one hourly lattice; offender " +
                         format_iso8601_s(grids[i].timestamp));
    }

    const auto strikes = io::read_strikes(strikes_file);
    LabelSeries series;
    std::vector<std::uint8_t> rain_only;
    std::size_t gi = 0;
    std::size_t positives = 0, rain_only_count = 0;
    for (std::int64_t t = t0; t <= grids.back().timestamp; t += kHourSeconds) {
      if (gi < grids.size() && grids[gi].timestamp == t) {
        const EventLabel ev = label_event(grids[gi], strikes, params);
        series.values.push_back(ev.label);
        series.mask.push_back(1);
        rain_only.push_back(ev.rain_only ? 1 : 0);
        positives += ev.label;
        rain_only_count += ev.rain_only ? 1 : 0;
        ++gi;
      } else {
        // Interior gap: keep the hourly lattice, mark the hour missing.
        series.values.push_back(0);
        series.mask.push_back(0);
        rain_only.push_back(0);
      }
      series.timestamps.push_back(t);
    }
    io::write_label_series(out, series, rain_only, digest);
    std::cout << "labeled " << grids.size() << " hours (" << positives
              << " events, " << rain_only_count << " rain-only) -> " << out
              << '\n';
    return kExitOk;
  }
};

struct TrainOpts {
  std::string features;
  std::string labels;
  std::string train_range;
  std::string validation_range;
  std::string test_range;
  int epochs = 100;
  int runs = 10;
  int hidden = 8;
  int batch = 72;
  double lr = 0.001;
  std::uint64_t seed = 0;
  bool snapshots = false;
  std::string out_dir;

  int run() const {
    const io::FeatureFile feat = io::read_features(features);
    const io::LabelSeriesFile lab = io::read_label_series(labels);
    if (feat.timestamps != lab.series.timestamps)
      throw AlignmentError("feature and label timestamps disagree");
    const std::size_t n = lab.series.size();
    const Range tr = parse_range(train_range, "--train");
    const Range va = parse_range(validation_range, "--validation");
    const Range te = parse_range(test_range, "--test");
    if (te.end > n) throw InputError("--test range runs past the series end");
    if (tr.end > va.begin || va.end > te.begin)
      throw InputError(
          "splits must be chronological and non-overlapping: train, then "
          "validation, then test");
    if (runs < 1) throw InputError("--runs must be positive");

    auto make_split = [&](const Range& r) {
      SplitData s;
      s.features = feat.features.middleRows(
          static_cast<Eigen::Index>(r.begin),
          static_cast<Eigen::Index>(r.end - r.begin));
      s.labels.assign(lab.series.values.begin() + static_cast<std::ptrdiff_t>(r.begin),
                      lab.series.values.begin() + static_cast<std::ptrdiff_t>(r.end));
      return s;
    };
    const SplitData train_full = make_split(tr);
    const SplitData validation_split = make_split(va);
    const SplitData test_split = make_split(te);

    // Fit on present hours only; probabilities still cover every hour.
    std::vector<std::size_t> fit_rows;
    for (std::size_t i = tr.begin; i < tr.end; ++i)
      if (lab.series.mask[i]) fit_rows.push_back(i - tr.begin);
    if (fit_rows.empty())
      throw InputError("training split has no unmasked samples");
    const bool refit_probs = fit_rows.size() != train_full.labels.size();
    SplitData fit;
    if (refit_probs) {
      fit.features.resize(static_cast<Eigen::Index>(fit_rows.size()),
                          train_full.features.cols());
      fit.labels.resize(fit_rows.size());
      for (std::size_t j = 0; j < fit_rows.size(); ++j) {
        fit.features.row(static_cast<Eigen::Index>(j)) =
            train_full.features.row(static_cast<Eigen::Index>(fit_rows[j]));
        fit.labels[j] = train_full.labels[fit_rows[j]];
      }
    } else {
      fit = train_full;
    }

    TrainConfig tc;
    tc.epochs = epochs;
    tc.hidden_units = hidden;
    tc.learning_rate = lr;
    tc.batch_size = batch;
    tc.validate();

    const json c{{"command", "train"},
                 {"features", features},
                 {"labels", labels},
                 {"train", train_range},
                 {"validation", validation_range},
                 {"test", test_range},
                 {"epochs", epochs},
                 {"runs", runs},
                 {"hidden", hidden},
                 {"batch", batch},
                 {"lr", lr},
                 {"seed", seed},
                 {"snapshots", snapshots}};
    const std::string digest = io::config_digest(c);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::MatrixManifest m;
    m.runs = runs;
    m.epochs = epochs;
    m.seed = seed;
    // Keep the manifest portable: record the labels path relative to it.
    const fs::path labels_rel =
        fs::relative(fs::absolute(labels), fs::absolute(dir));
    m.labels_path = labels_rel.empty() ? fs::absolute(labels).string()
                                       : labels_rel.generic_string();
    m.train_begin = tr.begin;
    m.train_end = tr.end;
    m.validation_begin = va.begin;
    m.validation_end = va.end;
    m.test_begin = te.begin;
    m.test_end = te.end;
    m.config = json{{"epochs", epochs},     {"runs", runs},
                    {"learning_rate", lr},  {"batch_size", batch},
                    {"hidden_units", hidden}, {"seed", seed}};

    for (int k = 0; k < runs; ++k) {
      tc.seed = child_seed(seed, "train-run/" + std::to_string(k + 1));
      const TrainResult res =
          train_toy_classifier(fit, validation_split, test_split, tc);
      EpochMatrix train_probs;
      if (refit_probs) {
        train_probs.probs.reserve(res.snapshots.size());
        for (const auto& snap : res.snapshots)
          train_probs.probs.push_back(
              toy_classifier_probs(snap, train_full.features));
      } else {
        train_probs = res.probs.train;
      }
      io::MatrixManifest::RunFiles f{run_file_name(k, "train"),
                                     run_file_name(k, "validation"),
                                     run_file_name(k, "test")};
      io::write_epoch_matrix(dir / f.train, train_probs,
                             static_cast<std::int64_t>(tr.begin), digest);
      io::write_epoch_matrix(dir / f.validation, res.probs.validation,
                             static_cast<std::int64_t>(va.begin), digest);
      io::write_epoch_matrix(dir / f.test, res.probs.test,
                             static_cast<std::int64_t>(te.begin), digest);
      if (snapshots)
        io::write_param_snapshots(dir / (run_stem(k) + "_params.bin"),
                                  dir / (run_stem(k) + "_params.json"),
                                  res.snapshots, tc.seed, digest);
      m.files.push_back(std::move(f));
    }
    io::write_matrix_manifest(dir / "matrix_manifest.json", m, digest);
    std::cout << "trained " << runs << " runs x " << epochs << " epochs -> "
              << out_dir << '\n';
    return kExitOk;
  }
};

struct EnsembleOpts {
  std::string matrix;
  std::string score = "tss";
  std::string run_score;  // empty: same as --score
  int window = 3;
  std::string gamma_grid = "0.8:0.99:0.01";
  std::string thresholds = "unique";
  std::string out_dir;

  int run() const {
    const fs::path mpath(matrix);
    const io::MatrixManifest m = io::read_matrix_manifest(mpath);
    const fs::path base =
        mpath.has_parent_path() ? mpath.parent_path() : fs::path(".");
    auto resolve = [&](const std::string& p) {
      const fs::path q(p);
      return q.is_absolute() ? q : base / q;
    };
    const io::LabelSeriesFile lab = io::read_label_series(resolve(m.labels_path));
    if (m.test_end > lab.series.size())
      throw InputError(matrix + ": split ranges run past the label series");
    SplitLabels labels;
    labels.train = lab.series.slice(m.train_begin, m.train_end);
    labels.validation = lab.series.slice(m.validation_begin, m.validation_end);
    labels.test = lab.series.slice(m.test_begin, m.test_end);

    auto load = [&](const std::string& file, std::size_t begin, std::size_t end) {
      const io::EpochMatrixFile f = io::read_epoch_matrix(resolve(file));
      if (f.sample_ids.size() != end - begin)
        throw AlignmentError(file + ": expected samples [" +
                             std::to_string(begin) + ", " + std::to_string(end) +
                             "), got " + std::to_string(f.sample_ids.size()) +
                             " rows");
      for (std::size_t i = 0; i < f.sample_ids.size(); ++i)
        if (f.sample_ids[i] != static_cast<std::int64_t>(begin + i))
          throw AlignmentError(file + ": sample ids do not cover [" +
                               std::to_string(begin) + ", " +
                               std::to_string(end) + ")");
      if (f.matrix.n_epochs() != static_cast<std::size_t>(m.epochs))
        throw InputError(file + ": epoch count disagrees with the manifest");
      return f.matrix;
    };
    std::vector<RunSplits> runs;
    for (const auto& rf : m.files) {
      RunSplits r;
      r.train = load(rf.train, m.train_begin, m.train_end);
      r.validation = load(rf.validation, m.validation_begin, m.validation_end);
      r.test = load(rf.test, m.test_begin, m.test_end);
      runs.push_back(std::move(r));
    }

    EnsembleConfig cfg;
    cfg.epochs = m.epochs;
    cfg.runs = m.runs;
    cfg.window.T = window;
    cfg.selection_score = parse_score(score);
    cfg.run_score = parse_score(run_score.empty() ? score : run_score);
    cfg.gamma_grid = parse_gamma_grid(gamma_grid);
    cfg.threshold_grid = parse_threshold_grid(thresholds);
    cfg.validate();

    const json c{{"command", "ensemble"},
                 {"matrix", matrix},
                 {"score", std::string(score_name(cfg.selection_score))},
                 {"run_score", std::string(score_name(cfg.run_score))},
                 {"window", window},
                 {"gamma_grid", gamma_grid},
                 {"thresholds", thresholds}};
    const std::string digest = io::config_digest(c);

    const EnsembleDecision decision = select_run(runs, labels, cfg);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::DecisionFile df;
    df.decision = decision;
    df.selection_score = std::string(score_name(cfg.selection_score));
    df.run_score = std::string(score_name(cfg.run_score));
    df.window_T = window;
    io::write_decision(dir / "decision.json", df, digest);

    const ScoreTable plain =
        confusion_matrix(labels.test, decision.test_prediction);
    const ScoreTable weighted = value_weighted_confusion_matrix(
        labels.test, decision.test_prediction, cfg.window);
    io::write_score_report(dir / "score_report.json", plain, weighted, window,
                           digest);
    auto or_na = [](Score s, const ScoreTable& t) -> std::string {
      try {
        return io::format_double(score_value(s, t));
      } catch (const UndefinedScoreError&) {
        return "n/a";
      }
    };
    std::cout << "chose run " << decision.chosen_run + 1 << " of " << m.runs
              << " (gamma " << decision.gamma << ", " << decision.epochs.size()
              << " epochs)\n"
              << "test tss " << or_na(Score::tss, plain) << ", csi "
              << or_na(Score::csi, plain) << ", wtss "
              << or_na(Score::wtss, weighted) << ", wcsi "
              << or_na(Score::wcsi, weighted) << '\n';
    return kExitOk;
  }
};

struct TimelineOpts {
  std::string decision;
  std::string labels;
  std::string out;

  int run() const {
    const io::DecisionFile df = io::read_decision(decision);
    const io::LabelSeriesFile lab = io::read_label_series(labels);
    const auto& want = df.decision.test_timestamps;
    if (want.empty())
      throw InputError(decision + ": decision carries no test timeline");
    const auto& have = lab.series.timestamps;
    const auto it = std::find(have.begin(), have.end(), want.front());
    if (it == have.end() ||
        static_cast<std::size_t>(have.end() - it) < want.size())
      throw AlignmentError("decision timeline not found in the label series");
    const std::size_t start = static_cast<std::size_t>(it - have.begin());
    for (std::size_t i = 0; i < want.size(); ++i)
      if (have[start + i] != want[i])
        throw AlignmentError("decision timeline not contiguous in the label series");
    const LabelSeries actual = lab.series.slice(start, start + want.size());
    std::vector<std::uint8_t> rain_only;
    if (!lab.rain_only.empty())
      rain_only.assign(
          lab.rain_only.begin() + static_cast<std::ptrdiff_t>(start),
          lab.rain_only.begin() + static_cast<std::ptrdiff_t>(start + want.size()));
    const json c{{"command", "timeline"},
                 {"decision", decision},
                 {"labels", labels}};
    io::write_timeline(out, actual, rain_only, df.decision.test_prediction,
                       io::config_digest(c));
    std::cout << "wrote " << want.size() << " timeline rows to " << out << '\n';
    return kExitOk;
  }
};

struct ScoreOpts {
  std::string actual;
  std::string predicted;
  int window = 3;
  std::string out;

  int run() const {
    const io::LabelSeriesFile a = io::read_label_series(actual);
    const io::LabelSeriesFile p = io::read_label_series(predicted);
    if (a.series.timestamps != p.series.timestamps)
      throw AlignmentError("actual and predicted timestamps disagree");
    WeightWindowConfig w;
    w.T = window;
    w.validate();
    const PredictionSeries pred{p.series.values};
    const ScoreTable plain = confusion_matrix(a.series, pred);
    const ScoreTable weighted =
        value_weighted_confusion_matrix(a.series, pred, w);
    const json c{{"command", "score"},
                 {"actual", actual},
                 {"predicted", predicted},
                 {"window", window}};
    const std::string digest = io::config_digest(c);
    if (out.empty()) {
      json report = io::score_report_json(plain, weighted, window);
      report["manifest"] = io::manifest_json(digest);
      std::cout << report.dump(2) << '\n';
    } else {
      io::write_score_report(out, plain, weighted, window, digest);
      std::cout << "wrote score report to " << out << '\n';
    }
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"severe-storm forecast verification and ensemble selection"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.set_config("--config")->description(
      "JSON config file mirroring the flags; command-line flags win");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(false);
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate synthetic fixtures");
  synth->require_subcommand(1);

  SynthEventsOpts ev;
  auto* synth_events =
      synth->add_subcommand("events", "hourly binary event stream");
  synth_events->add_option("--seed", ev.seed, "rng seed");
  synth_events->add_option("--length", ev.length, "series length in hours");
  synth_events->add_option("--event-rate", ev.event_rate,
                           "stationary positive rate");
  synth_events->add_option("--persistence", ev.persistence,
                           "P(event hour follows event hour)");
  synth_events->add_option("--out", ev.out, "output label CSV")->required();

  SynthFeaturesOpts fe;
  auto* synth_features =
      synth->add_subcommand("features", "class-separated feature rows");
  synth_features->add_option("--labels", fe.labels, "label CSV to mirror")
      ->required();
  synth_features->add_option("--dims", fe.dims, "feature dimension");
  synth_features->add_option("--seed", fe.seed, "rng seed");
  synth_features->add_option("--skill", fe.skill, "class separation scale");
  synth_features->add_option("--out", fe.out, "output feature CSV")->required();

  SynthProbsOpts pr;
  auto* synth_probs = synth->add_subcommand(
      "probs", "multi-run epoch probability matrices with a manifest");
  synth_probs->add_option("--seed", pr.seed, "rng seed");
  synth_probs->add_option("--runs", pr.runs, "training runs M");
  synth_probs->add_option("--epochs", pr.epochs, "epochs per run N");
  synth_probs->add_option("--train-len", pr.train_len, "training hours");
  synth_probs->add_option("--validation-len", pr.validation_len,
                          "validation hours");
  synth_probs->add_option("--test-len", pr.test_len, "test hours");
  synth_probs->add_option("--event-rate", pr.event_rate,
                          "stationary positive rate");
  synth_probs->add_option("--persistence", pr.persistence,
                          "P(event hour follows event hour)");
  synth_probs->add_option("--skill", pr.skill, "class separation scale");
  synth_probs->add_option("--noise", pr.noise, "per-epoch noise amplitude");
  synth_probs->add_option("--quality-min", pr.quality_min,
                          "weakest run multiplier");
  synth_probs->add_option("--quality-max", pr.quality_max,
                          "strongest run multiplier");
  synth_probs->add_option("--out", pr.out_dir, "output directory")->required();

  SynthScenesOpts sce;
  auto* synth_scenes =
      synth->add_subcommand("scenes", "rain grids with lightning strikes");
  synth_scenes->add_option("--seed", sce.seed, "rng seed");
  synth_scenes->add_option("--count", sce.count, "number of scenes");
  synth_scenes->add_option(
      "--category", sce.category,
      "qualifying|rain_only|isolated_pixel|null_scene|mixed");
  synth_scenes->add_option("--rows", sce.rows, "grid rows");
  synth_scenes->add_option("--cols", sce.cols, "grid columns");
  synth_scenes->add_option("--missing-rate", sce.missing_rate,
                           "fraction of missing cells");
  synth_scenes->add_option("--out", sce.out_dir, "output directory")->required();

  LabelOpts la;
  auto* label = app.add_subcommand(
      "label", "label hourly rain grids against lightning strikes");
  label->add_option("--rain-dir", la.rain_dir, "directory of rain grids")
      ->required();
  label->add_option("--strikes", la.strikes_file, "lightning strike CSV")
      ->required();
  label->add_option("--thresh", la.thresh, "rain threshold, mm/h");
  label->add_option("--min-size", la.min_size, "minimum component pixels");
  label->add_option("--connectivity", la.connectivity, "four|eight");
  label->add_option("--radius-km", la.radius_km, "strike capture radius");
  label->add_option("--window-min", la.window_min,
                    "strike window length, minutes");
  label->add_option("--min-count", la.min_count, "strikes needed in a window");
  label->add_option("--out", la.out, "output label CSV")->required();

  TrainOpts tn;
  auto* train = app.add_subcommand(
      "train", "train toy classifiers and emit epoch probability matrices");
  train->add_option("--features", tn.features, "feature CSV")->required();
  train->add_option("--labels", tn.labels, "label CSV")->required();
  train->add_option("--train", tn.train_range, "training rows begin:end")
      ->required();
  train->add_option("--validation", tn.validation_range,
                    "validation rows begin:end")
      ->required();
  train->add_option("--test", tn.test_range, "test rows begin:end")->required();
  train->add_option("--epochs", tn.epochs, "training epochs N");
  train->add_option("--runs", tn.runs, "independent runs M");
  train->add_option("--hidden", tn.hidden, "hidden units");
  train->add_option("--batch", tn.batch, "mini-batch size");
  train->add_option("--lr", tn.lr, "learning rate");
  train->add_option("--seed", tn.seed, "rng seed; runs derive children");
  train->add_flag("--snapshots", tn.snapshots, "write per-epoch parameters");
  train->add_option("--out", tn.out_dir, "output directory")->required();

  EnsembleOpts en;
  auto* ensemble = app.add_subcommand(
      "ensemble", "pick epochs and a run, then score the test split");
  ensemble->add_option("--matrix", en.matrix, "matrix manifest JSON")
      ->required();
  ensemble->add_option("--score", en.score,
                       "selection score S: tss|csi|wtss|wcsi");
  ensemble->add_option("--run-score", en.run_score,
                       "run-choice score S'; defaults to --score");
  ensemble->add_option("--window", en.window, "weight window T");
  ensemble->add_option("--gamma-grid", en.gamma_grid,
                       "level grid start:stop:step");
  ensemble->add_option("--thresholds", en.thresholds,
                       "'unique' or 'uniform:<count>'");
  ensemble->add_option("--out", en.out_dir, "output directory")->required();

  TimelineOpts tl;
  auto* timeline = app.add_subcommand(
      "timeline", "align a decision with labels into plot-ready rows");
  timeline->add_option("--decision", tl.decision, "decision JSON")->required();
  timeline->add_option("--labels", tl.labels, "label CSV")->required();
  timeline->add_option("--out", tl.out, "output timeline CSV")->required();

  ScoreOpts sc;
  auto* score = app.add_subcommand(
      "score", "score a prediction series against actual labels");
  score->add_option("--actual", sc.actual, "actual label CSV")->required();
  score->add_option("--predicted", sc.predicted, "predicted label CSV")
      ->required();
  score->add_option("--window", sc.window, "weight window T");
  score->add_option("--out", sc.out, "score report JSON; stdout when absent");

  try {
    app.parse(argc, argv);
    if (synth_events->parsed()) return ev.run();
    if (synth_features->parsed()) return fe.run();
    if (synth_probs->parsed()) return pr.run();
    if (synth_scenes->parsed()) return sce.run();
    if (label->parsed()) return la.run();
    if (train->parsed()) return tn.run();
    if (ensemble->parsed()) return en.run();
    if (timeline->parsed()) return tl.run();
    if (score->parsed()) return sc.run();
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  } catch (const UndefinedScoreError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUndefinedScore;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}
