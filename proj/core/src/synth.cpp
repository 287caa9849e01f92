#include "stormwarn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stormwarn/errors.hpp"
#include "stormwarn/rng.hpp"
#include "stormwarn/time.hpp"

namespace stormwarn {

void SynthConfig::validate() const {
  if (length < 1) throw InputError("stream length must be at least 1");
  if (!(base_event_rate >= 0.0 && base_event_rate <= 1.0))
    throw InputError("base event rate must lie in [0,1]");
  if (!(persistence >= 0.0 && persistence <= 1.0))
    throw InputError("persistence must lie in [0,1]");
  if (!(skill >= 0.0)) throw InputError("skill cannot be negative");
  if (!(noise_per_epoch >= 0.0)) throw InputError("noise cannot be negative");
}

LabelSeries generate_event_stream(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(child_seed(cfg.seed, "event-stream"));
  const double r = cfg.base_event_rate;
  const double p11 = cfg.persistence;
  // Entry probability chosen so the stationary positive rate is r.
  const double p01 =
      r >= 1.0 ? 1.0 : std::clamp(r * (1.0 - p11) / (1.0 - r), 0.0, 1.0);

  std::vector<std::uint8_t> values(cfg.length);
  std::uint8_t state = rng.bernoulli(r) ? 1 : 0;
  for (std::size_t i = 0; i < cfg.length; ++i) {
    values[i] = state;
    state = rng.bernoulli(state ? p11 : p01) ? 1 : 0;
  }
  return LabelSeries::hourly(std::move(values), kSynthStartTimestamp);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Rises for early epochs, plateaus near mult*skill, with epoch jitter.
std::vector<double> epoch_quality(int epochs, double skill, double mult,
                                  Rng& rng) {
  const double ramp = std::max(1.0, static_cast<double>(epochs) / 3.0);
  std::vector<double> q(static_cast<std::size_t>(epochs));
  for (int j = 0; j < epochs; ++j) {
    const double progress = (j + 1.0) / ((j + 1.0) + ramp);
    q[static_cast<std::size_t>(j)] =
        mult * skill * progress * std::max(0.0, 1.0 + 0.2 * rng.normal());
  }
  return q;
}

std::vector<double> sample_difficulty(std::size_t n, Rng& rng) {
  std::vector<double> d(n);
  for (auto& v : d) v = rng.normal();
  return d;
}

EpochMatrix trajectories(const LabelSeries& labels,
                         const std::vector<double>& quality, double noise_amp,
                         const std::vector<double>& difficulty, Rng& noise_rng) {
  EpochMatrix m;
  m.probs.assign(quality.size(), std::vector<double>(labels.size()));
  for (std::size_t j = 0; j < quality.size(); ++j) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double sign = labels.values[i] ? 1.0 : -1.0;
      const double z = quality[j] * sign * (1.0 + 0.5 * difficulty[i]) +
                       noise_amp * noise_rng.normal();
      m.probs[j][i] = sigmoid(z);
    }
  }
  return m;
}

}  // namespace

EpochMatrix generate_probability_trajectories(const LabelSeries& labels,
                                              int epochs,
                                              const SynthConfig& cfg) {
  cfg.validate();
  labels.validate();
  if (epochs < 1) throw InputError("epoch count must be at least 1");

  Rng quality_rng(child_seed(cfg.seed, "epoch-quality"));
  Rng difficulty_rng(child_seed(cfg.seed, "sample-difficulty"));
  Rng noise_rng(child_seed(cfg.seed, "epoch-noise"));
  const std::vector<double> q = epoch_quality(epochs, cfg.skill, 1.0, quality_rng);
  const std::vector<double> d = sample_difficulty(labels.size(), difficulty_rng);
  return trajectories(labels, q, cfg.noise_per_epoch, d, noise_rng);
}

Eigen::MatrixXd generate_features(const LabelSeries& labels, int dims,
                                  const SynthConfig& cfg) {
  cfg.validate();
  labels.validate();
  if (dims < 1) throw InputError("feature dimension must be at least 1");

  Rng center_rng(child_seed(cfg.seed, "feature-centers"));
  Rng noise_rng(child_seed(cfg.seed, "feature-noise"));
  std::vector<double> centers(static_cast<std::size_t>(dims));
  const double scale = cfg.skill / std::sqrt(static_cast<double>(dims));
  for (auto& c : centers) c = scale * (0.3 + 0.7 * center_rng.uniform01());

  Eigen::MatrixXd x(static_cast<Eigen::Index>(labels.size()), dims);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double sign = labels.values[i] ? 1.0 : -1.0;
    for (int m = 0; m < dims; ++m)
      x(static_cast<Eigen::Index>(i), m) =
          sign * centers[static_cast<std::size_t>(m)] + noise_rng.normal();
  }
  return x;
}

void StudyConfig::validate() const {
  base.validate();
  if (train_len < 1 || validation_len < 1 || test_len < 1)
    throw InputError("every split needs at least one sample");
  if (epochs < 1) throw InputError("epoch count must be at least 1");
  if (runs < 1) throw InputError("run count must be at least 1");
  if (!(run_quality_min > 0.0) || !(run_quality_max >= run_quality_min))
    throw InputError("run quality range must be positive and ordered");
}

SyntheticStudy generate_study(const StudyConfig& cfg) {
  cfg.validate();

  SynthConfig stream_cfg = cfg.base;
  stream_cfg.length = cfg.train_len + cfg.validation_len + cfg.test_len;
  const LabelSeries all = generate_event_stream(stream_cfg);

  SyntheticStudy study;
  study.labels.train = all.slice(0, cfg.train_len);
  study.labels.validation =
      all.slice(cfg.train_len, cfg.train_len + cfg.validation_len);
  study.labels.test =
      all.slice(cfg.train_len + cfg.validation_len, all.size());

  // Sample difficulty belongs to the sample, so it is shared across runs.
  Rng dtr(child_seed(cfg.base.seed, "difficulty/train"));
  Rng dva(child_seed(cfg.base.seed, "difficulty/validation"));
  Rng dte(child_seed(cfg.base.seed, "difficulty/test"));
  const std::vector<double> diff_train = sample_difficulty(cfg.train_len, dtr);
  const std::vector<double> diff_val = sample_difficulty(cfg.validation_len, dva);
  const std::vector<double> diff_test = sample_difficulty(cfg.test_len, dte);

  Rng run_rng(child_seed(cfg.base.seed, "run-quality"));
  study.runs.reserve(static_cast<std::size_t>(cfg.runs));
  for (int k = 0; k < cfg.runs; ++k) {
    const double mult =
        cfg.run_quality_min +
        (cfg.run_quality_max - cfg.run_quality_min) * run_rng.uniform01();
    const std::string tag = "/run" + std::to_string(k);
    Rng quality_rng(child_seed(cfg.base.seed, "epoch-quality" + tag));
    const std::vector<double> q =
        epoch_quality(cfg.epochs, cfg.base.skill, mult, quality_rng);

    RunSplits run;
    Rng ntr(child_seed(cfg.base.seed, "noise/train" + tag));
    Rng nva(child_seed(cfg.base.seed, "noise/validation" + tag));
    Rng nte(child_seed(cfg.base.seed, "noise/test" + tag));
    run.train = trajectories(study.labels.train, q, cfg.base.noise_per_epoch,
                             diff_train, ntr);
    run.validation = trajectories(study.labels.validation, q,
                                  cfg.base.noise_per_epoch, diff_val, nva);
    run.test = trajectories(study.labels.test, q, cfg.base.noise_per_epoch,
                            diff_test, nte);
    study.runs.push_back(std::move(run));
  }
  return study;
}

std::string_view scene_category_name(SceneCategory c) {
  switch (c) {
    case SceneCategory::qualifying: return "qualifying";
    case SceneCategory::rain_only: return "rain_only";
    case SceneCategory::isolated_pixel: return "isolated_pixel";
    case SceneCategory::null_scene: return "null";
  }
  return "?";
}

SceneCategory parse_scene_category(std::string_view name) {
  if (name == "qualifying") return SceneCategory::qualifying;
  if (name == "rain_only") return SceneCategory::rain_only;
  if (name == "isolated_pixel") return SceneCategory::isolated_pixel;
  if (name == "null") return SceneCategory::null_scene;
  throw InputError("unknown scene category: " + std::string(name));
}

void SceneConfig::validate() const {
  if (rows < 8 || cols < 8)
    throw InputError("scene rasters need at least 8x8 cells");
  if (!(dlat > 0.0) || !(dlon > 0.0))
    throw InputError("raster cell steps must be positive");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0))
    throw InputError("missing rate must lie in [0,1)");
  params.validate();
}

namespace {

// Grow a four-connected blob of the given size at least one cell inside the
// border. Four-connected growth keeps it one component under either
// connectivity choice.
std::vector<PixelIndex> grow_blob(int rows, int cols, int size, Rng& rng) {
  std::vector<PixelIndex> blob;
  std::vector<std::uint8_t> in(
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
  auto idx = [&](int r, int c) {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c);
  };
  const int r0 = 2 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(rows - 4)));
  const int c0 = 2 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(cols - 4)));
  blob.push_back({r0, c0});
  in[idx(r0, c0)] = 1;
  static constexpr int kMoves[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  while (static_cast<int>(blob.size()) < size) {
    const PixelIndex seed_px =
        blob[static_cast<std::size_t>(rng.bounded(blob.size()))];
    const auto& mv = kMoves[rng.bounded(4)];
    const int nr = seed_px.row + mv[0];
    const int nc = seed_px.col + mv[1];
    if (nr < 1 || nr >= rows - 1 || nc < 1 || nc >= cols - 1) continue;
    if (in[idx(nr, nc)]) continue;
    in[idx(nr, nc)] = 1;
    blob.push_back({nr, nc});
  }
  std::sort(blob.begin(), blob.end(),
            [](const PixelIndex& a, const PixelIndex& b) {
              if (a.row != b.row) return a.row < b.row;
              return a.col < b.col;
            });
  return blob;
}

// Pixels pairwise at Chebyshev distance >= 2: singletons under both
// connectivities.
std::vector<PixelIndex> scatter_isolated(int rows, int cols, int count,
                                         Rng& rng) {
  std::vector<PixelIndex> out;
  while (static_cast<int>(out.size()) < count) {
    const int r = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(rows - 2)));
    const int c = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(cols - 2)));
    bool ok = true;
    for (const auto& p : out)
      if (std::abs(p.row - r) <= 1 && std::abs(p.col - c) <= 1) ok = false;
    if (ok) out.push_back({r, c});
  }
  std::sort(out.begin(), out.end(), [](const PixelIndex& a, const PixelIndex& b) {
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  return out;
}

}  // namespace

Scene generate_rain_lightning_scene(const SceneConfig& cfg) {
  cfg.validate();
  Rng bg_rng(child_seed(cfg.seed, "scene-background"));
  Rng shape_rng(child_seed(cfg.seed, "scene-shape"));
  Rng strike_rng(child_seed(cfg.seed, "scene-strikes"));

  Scene scene;
  RainGrid& grid = scene.grid;
  grid.rows = cfg.rows;
  grid.cols = cfg.cols;
  grid.lat0 = cfg.lat0;
  grid.lon0 = cfg.lon0;
  grid.dlat = cfg.dlat;
  grid.dlon = cfg.dlon;
  grid.timestamp = cfg.timestamp;
  grid.values.resize(static_cast<std::size_t>(cfg.rows) *
                     static_cast<std::size_t>(cfg.cols));
  for (auto& v : grid.values)
    v = bg_rng.uniform01() * 0.4 * cfg.params.thresh_mm_h;  // always dry

  std::vector<PixelIndex> wet;
  const bool has_blob = cfg.category == SceneCategory::qualifying ||
                        cfg.category == SceneCategory::rain_only;
  if (has_blob) {
    const int size =
        cfg.params.min_size + static_cast<int>(shape_rng.bounded(4));
    wet = grow_blob(cfg.rows, cfg.cols, size, shape_rng);
  } else if (cfg.category == SceneCategory::isolated_pixel &&
             cfg.params.min_size >= 2) {
    // min_size 1 admits no isolated-yet-wet pixel; the scene stays null.
    const int count = 1 + static_cast<int>(shape_rng.bounded(
                              static_cast<std::uint64_t>(cfg.params.min_size - 1)));
    wet = scatter_isolated(cfg.rows, cfg.cols, count, shape_rng);
  }
  auto cell = [&](const PixelIndex& p) -> double& {
    return grid.values[static_cast<std::size_t>(p.row) *
                           static_cast<std::size_t>(cfg.cols) +
                       static_cast<std::size_t>(p.col)];
  };
  for (const auto& p : wet)
    cell(p) = cfg.params.thresh_mm_h * (1.1 + shape_rng.uniform01());

  // Missing cells never touch the wet pixels; they read as dry.
  std::size_t missing = 0;
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      const bool drop = bg_rng.bernoulli(cfg.missing_rate);
      if (!drop) continue;
      const std::size_t i = static_cast<std::size_t>(r) *
                                static_cast<std::size_t>(cfg.cols) +
                            static_cast<std::size_t>(c);
      if (grid.values[i] > cfg.params.thresh_mm_h) continue;
      grid.values[i] = std::numeric_limits<double>::quiet_NaN();
      ++missing;
    }
  }

  const std::int64_t hour_us = cfg.timestamp * kMicrosPerSecond;
  auto near_strike = [&](const PixelIndex& p, std::int64_t t_us) {
    const LatLon ll = grid.cell_center(p.row, p.col);
    return LightningRecord{hour_us + t_us,
                           ll.lat + (strike_rng.uniform01() - 0.5) * 0.002,
                           ll.lon + (strike_rng.uniform01() - 0.5) * 0.002};
  };
  auto pick_wet = [&]() -> const PixelIndex& {
    return wet[static_cast<std::size_t>(strike_rng.bounded(wet.size()))];
  };
  const auto window_us = static_cast<std::int64_t>(
      cfg.params.window_min * 60.0 * kMicrosPerSecond);

  // A burst of `count` near strikes spanning 80% of the rule window.
  auto add_burst = [&](int count) {
    if (wet.empty()) return;
    const std::int64_t start =
        static_cast<std::int64_t>(strike_rng.bounded(46)) * 60 *
        kMicrosPerSecond;
    const std::int64_t span = window_us * 8 / 10;
    for (int i = 0; i < count; ++i) {
      const std::int64_t t =
          start + span * i / std::max(1, count) +
          static_cast<std::int64_t>(strike_rng.bounded(
              static_cast<std::uint64_t>(span / (3 * std::max(1, count)) + 1)));
      scene.strikes.push_back(near_strike(pick_wet(), t));
    }
  };

  switch (cfg.category) {
    case SceneCategory::qualifying:
      add_burst(cfg.params.min_count + static_cast<int>(strike_rng.bounded(6)));
      break;
    case SceneCategory::rain_only:
      // The spread variant needs min_count >= 3 to be a true negative.
      if (strike_rng.bernoulli(0.5) || cfg.params.min_count < 3) {
        // Too few strikes in the hour; a full burst lands in the next hour
        // to exercise the hour filter.
        add_burst(static_cast<int>(strike_rng.bounded(
            static_cast<std::uint64_t>(cfg.params.min_count))));
        const std::int64_t shift = kHourSeconds * kMicrosPerSecond;
        for (int i = 0; i < cfg.params.min_count + 1; ++i)
          scene.strikes.push_back(near_strike(
              pick_wet(), shift + static_cast<std::int64_t>(strike_rng.bounded(
                                      kHourSeconds * kMicrosPerSecond))));
      } else {
        // Enough strikes but spread so no rule window holds min_count:
        // spacing well beyond window/min_count.
        const std::int64_t spacing = window_us * 6 / 10;
        const int count = cfg.params.min_count + 1 +
                          static_cast<int>(strike_rng.bounded(3));
        for (int i = 0; i < count; ++i) {
          const std::int64_t t = spacing * i;
          if (t >= kHourSeconds * kMicrosPerSecond) break;
          scene.strikes.push_back(near_strike(pick_wet(), t));
        }
      }
      break;
    case SceneCategory::isolated_pixel:
      // Lightning without a qualifying component never labels the hour.
      add_burst(cfg.params.min_count + static_cast<int>(strike_rng.bounded(4)));
      break;
    case SceneCategory::null_scene:
      break;
  }

  // Distant decoys, far outside the strike radius of every cell.
  const int decoys = static_cast<int>(strike_rng.bounded(8));
  for (int i = 0; i < decoys; ++i)
    scene.strikes.push_back(
        {hour_us + static_cast<std::int64_t>(
                       strike_rng.bounded(kHourSeconds * kMicrosPerSecond)),
         cfg.lat0 - 2.0 + strike_rng.uniform01() * 0.5,
         cfg.lon0 - 2.0 + strike_rng.uniform01() * 0.5});
  std::sort(scene.strikes.begin(), scene.strikes.end(),
            [](const LightningRecord& a, const LightningRecord& b) {
              return a.time_us < b.time_us;
            });

  scene.expected.timestamp = cfg.timestamp;
  scene.expected.missing_cells = missing;
  switch (cfg.category) {
    case SceneCategory::qualifying:
      scene.expected.label = 1;
      scene.expected.component_pixels = wet;
      break;
    case SceneCategory::rain_only:
      scene.expected.rain_only = true;
      scene.expected.component_pixels = wet;
      break;
    case SceneCategory::isolated_pixel:
    case SceneCategory::null_scene:
      break;
  }
  return scene;
}

}  // namespace stormwarn
