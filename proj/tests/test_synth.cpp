#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stormwarn/errors.hpp"
#include "stormwarn/synth.hpp"
#include "stormwarn/time.hpp"

using namespace stormwarn;

namespace {

double class_gap(const std::vector<double>& probs,
                 const std::vector<std::uint8_t>& labels) {
  double pos = 0.0, neg = 0.0;
  std::size_t npos = 0, nneg = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i]) {
      pos += probs[i];
      ++npos;
    } else {
      neg += probs[i];
      ++nneg;
    }
  }
  REQUIRE(npos > 0);
  REQUIRE(nneg > 0);
  return pos / static_cast<double>(npos) - neg / static_cast<double>(nneg);
}

}  // namespace

TEST_CASE("event stream hits its stationary rate and clustering") {
  SynthConfig cfg;
  cfg.seed = 21;
  cfg.length = 60000;
  cfg.base_event_rate = 0.05;
  cfg.persistence = 0.7;
  const LabelSeries s = generate_event_stream(cfg);

  REQUIRE(s.size() == 60000);
  s.validate();
  CHECK(s.unmasked_count() == s.size());
  CHECK(s.timestamps.front() == kSynthStartTimestamp);
  CHECK(s.timestamps[1] == kSynthStartTimestamp + kHourSeconds);

  const double rate =
      static_cast<double>(s.positives()) / static_cast<double>(s.size());
  CHECK(rate == doctest::Approx(0.05).epsilon(0.2));

  std::size_t stay = 0, leave = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!s.values[i - 1]) continue;
    if (s.values[i])
      ++stay;
    else
      ++leave;
  }
  const double observed =
      static_cast<double>(stay) / static_cast<double>(stay + leave);
  CHECK(observed == doctest::Approx(0.7).epsilon(0.1));
}

TEST_CASE("event stream is deterministic in the seed") {
  SynthConfig cfg;
  cfg.seed = 22;
  cfg.length = 500;
  const LabelSeries a = generate_event_stream(cfg);
  const LabelSeries b = generate_event_stream(cfg);
  CHECK(a.values == b.values);
  cfg.seed = 23;
  const LabelSeries c = generate_event_stream(cfg);
  CHECK(a.values != c.values);
}

TEST_CASE("synthetic config validation") {
  SynthConfig cfg;
  cfg.length = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SynthConfig{};
  cfg.base_event_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SynthConfig{};
  cfg.persistence = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SynthConfig{};
  cfg.skill = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SynthConfig{};
  cfg.noise_per_epoch = -0.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("probability trajectories sharpen with training") {
  SynthConfig cfg;
  cfg.seed = 31;
  cfg.length = 3000;
  cfg.base_event_rate = 0.1;
  const LabelSeries labels = generate_event_stream(cfg);
  const EpochMatrix m = generate_probability_trajectories(labels, 16, cfg);

  REQUIRE(m.probs.size() == 16);
  for (const auto& epoch : m.probs) {
    REQUIRE(epoch.size() == labels.size());
    for (double p : epoch) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }

  // Early epochs barely separate the classes; late ones plateau well apart.
  double early = 0.0, late = 0.0;
  for (int j = 0; j < 3; ++j) early += class_gap(m.probs[j], labels.values);
  for (int j = 13; j < 16; ++j) late += class_gap(m.probs[j], labels.values);
  CHECK(late / 3.0 > early / 3.0 + 0.1);
  CHECK(late / 3.0 > 0.3);

  CHECK_THROWS_AS(generate_probability_trajectories(labels, 0, cfg), InputError);
}

TEST_CASE("features separate the classes along every dimension") {
  SynthConfig cfg;
  cfg.seed = 32;
  cfg.length = 2000;
  cfg.base_event_rate = 0.1;
  const LabelSeries labels = generate_event_stream(cfg);
  const Eigen::MatrixXd x = generate_features(labels, 8, cfg);

  REQUIRE(x.rows() == 2000);
  REQUIRE(x.cols() == 8);
  for (int m = 0; m < 8; ++m) {
    std::vector<double> col(2000);
    for (int i = 0; i < 2000; ++i) col[static_cast<std::size_t>(i)] = x(i, m);
    CHECK(class_gap(col, labels.values) > 0.2);
  }

  const Eigen::MatrixXd again = generate_features(labels, 8, cfg);
  CHECK(x == again);
  CHECK_THROWS_AS(generate_features(labels, 0, cfg), InputError);
}

TEST_CASE("study splits stay chronological and share the label stream") {
  StudyConfig cfg;
  cfg.base.seed = 41;
  cfg.base.base_event_rate = 0.1;
  cfg.train_len = 300;
  cfg.validation_len = 120;
  cfg.test_len = 120;
  cfg.epochs = 5;
  cfg.runs = 3;
  const SyntheticStudy study = generate_study(cfg);

  REQUIRE(study.labels.train.size() == 300);
  REQUIRE(study.labels.validation.size() == 120);
  REQUIRE(study.labels.test.size() == 120);
  CHECK(study.labels.validation.timestamps.front() ==
        study.labels.train.timestamps.back() + kHourSeconds);
  CHECK(study.labels.test.timestamps.front() ==
        study.labels.validation.timestamps.back() + kHourSeconds);

  REQUIRE(study.runs.size() == 3);
  for (const auto& run : study.runs) {
    REQUIRE(run.train.probs.size() == 5);
    REQUIRE(run.validation.probs.size() == 5);
    REQUIRE(run.test.probs.size() == 5);
    CHECK(run.train.probs[0].size() == 300);
    CHECK(run.validation.probs[0].size() == 120);
    CHECK(run.test.probs[0].size() == 120);
  }

  const SyntheticStudy again = generate_study(cfg);
  CHECK(study.labels.train.values == again.labels.train.values);
  CHECK(study.runs[0].train.probs == again.runs[0].train.probs);
  CHECK(study.runs[2].test.probs == again.runs[2].test.probs);
}

TEST_CASE("study runs differ in quality") {
  StudyConfig cfg;
  cfg.base.seed = 42;
  cfg.base.base_event_rate = 0.15;
  cfg.train_len = 200;
  cfg.validation_len = 200;
  cfg.test_len = 200;
  cfg.epochs = 6;
  cfg.runs = 3;
  cfg.run_quality_min = 0.5;
  cfg.run_quality_max = 1.5;
  const SyntheticStudy study = generate_study(cfg);

  std::vector<double> gaps;
  for (const auto& run : study.runs)
    gaps.push_back(
        class_gap(run.validation.probs.back(), study.labels.validation.values));
  const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
  CHECK(*hi - *lo > 0.02);
}

TEST_CASE("study config validation") {
  StudyConfig cfg;
  cfg.runs = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = StudyConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = StudyConfig{};
  cfg.validation_len = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = StudyConfig{};
  cfg.run_quality_min = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = StudyConfig{};
  cfg.run_quality_max = 0.5;  // below the default minimum
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("scene category names round-trip") {
  for (SceneCategory c :
       {SceneCategory::qualifying, SceneCategory::rain_only,
        SceneCategory::isolated_pixel, SceneCategory::null_scene})
    CHECK(parse_scene_category(scene_category_name(c)) == c);
  CHECK_THROWS_AS(parse_scene_category("volcanic"), InputError);
}

TEST_CASE("scenes keep their construction invariants") {
  for (int i = 0; i < 60; ++i) {
    SceneConfig cfg;
    cfg.seed = 500 + static_cast<std::uint64_t>(i);
    cfg.category = static_cast<SceneCategory>(i % 4);
    const Scene scene = generate_rain_lightning_scene(cfg);

    scene.grid.validate();
    CHECK(scene.grid.timestamp == cfg.timestamp);
    CHECK(scene.grid.missing_cells() == scene.expected.missing_cells);

    // Strikes arrive time-sorted with finite coordinates.
    for (std::size_t s = 1; s < scene.strikes.size(); ++s)
      CHECK(scene.strikes[s].time_us >= scene.strikes[s - 1].time_us);
    for (const auto& s : scene.strikes) {
      CHECK(std::isfinite(s.lat));
      CHECK(std::isfinite(s.lon));
    }

    // Marked component pixels really are wet, so missing never hides them.
    for (const auto& p : scene.expected.component_pixels) {
      const double v = scene.grid.at(p.row, p.col);
      CHECK(std::isfinite(v));
      CHECK(v > cfg.params.thresh_mm_h);
    }
  }
}

TEST_CASE("scenes honor the missing-rate knob") {
  SceneConfig cfg;
  cfg.seed = 77;
  cfg.missing_rate = 0.0;
  CHECK(generate_rain_lightning_scene(cfg).expected.missing_cells == 0);
  cfg.missing_rate = 0.3;
  const Scene holey = generate_rain_lightning_scene(cfg);
  // 24x32 cells at 30%: far from zero with overwhelming probability.
  CHECK(holey.expected.missing_cells > 100);
}

TEST_CASE("scene config validation") {
  SceneConfig cfg;
  cfg.rows = 4;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SceneConfig{};
  cfg.missing_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SceneConfig{};
  cfg.dlat = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = SceneConfig{};
  cfg.params.min_count = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}
