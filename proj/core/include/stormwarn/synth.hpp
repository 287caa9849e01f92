#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stormwarn/ensemble.hpp"
#include "stormwarn/labeling.hpp"
#include "stormwarn/series.hpp"

namespace stormwarn {

// 2020-01-01T00:00:00Z; synthetic series start here unless told otherwise.
inline constexpr std::int64_t kSynthStartTimestamp = 1577836800;

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t length = 7128;
  double base_event_rate = 105.0 / 7128.0;
  double persistence = 0.5;       // P(event hour follows event hour)
  double skill = 2.0;             // class separation scale, logit units
  double noise_per_epoch = 0.6;   // sample noise amplitude per epoch
  void validate() const;
};

// Two-state Markov chain with the stationary positive rate base_event_rate
// and clustering controlled by persistence. Hourly timestamps, full mask.
LabelSeries generate_event_stream(const SynthConfig& cfg);

// Per-epoch probabilities whose class separation rises with the epoch index
// and plateaus, with persistent per-sample difficulty plus fresh noise.
EpochMatrix generate_probability_trajectories(const LabelSeries& labels,
                                              int epochs,
                                              const SynthConfig& cfg);

// Features for the toy classifier: class-separated cluster centers plus unit
// noise, one row per sample.
Eigen::MatrixXd generate_features(const LabelSeries& labels, int dims,
                                  const SynthConfig& cfg);

// A full multi-run experiment: one chronologically split label stream and,
// per run, epoch-probability matrices for every split. Epoch quality is
// shared across a run's splits; runs differ by a quality multiplier so run
// selection has signal to find.
struct StudyConfig {
  SynthConfig base;
  std::size_t train_len = 7128;
  std::size_t validation_len = 1296;
  std::size_t test_len = 1899;
  int epochs = 16;
  int runs = 3;
  double run_quality_min = 0.75;
  double run_quality_max = 1.25;
  void validate() const;
};

struct SyntheticStudy {
  SplitLabels labels;
  std::vector<RunSplits> runs;
};

SyntheticStudy generate_study(const StudyConfig& cfg);

// Rain/lightning scenes with the ground truth their construction implies.
enum class SceneCategory { qualifying, rain_only, isolated_pixel, null_scene };

std::string_view scene_category_name(SceneCategory c);
SceneCategory parse_scene_category(std::string_view name);

struct SceneConfig {
  std::uint64_t seed = 0;
  SceneCategory category = SceneCategory::qualifying;
  int rows = 24;
  int cols = 32;
  double lat0 = 44.0;
  double lon0 = 8.0;
  double dlat = 0.009;     // ~1 km N-S
  double dlon = 0.013267;  // ~1 km E-W at these latitudes
  std::int64_t timestamp = kSynthStartTimestamp;
  double missing_rate = 0.02;
  LabelParams params;
  void validate() const;
};

struct Scene {
  RainGrid grid;
  std::vector<LightningRecord> strikes;  // time-sorted, decoys included
  EventLabel expected;
};

Scene generate_rain_lightning_scene(const SceneConfig& cfg);

}  // namespace stormwarn
