#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "stormwarn/errors.hpp"
#include "stormwarn/geo.hpp"
#include "stormwarn/labeling.hpp"
#include "stormwarn/rng.hpp"
#include "stormwarn/synth.hpp"
#include "stormwarn/time.hpp"

using namespace stormwarn;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kHour = 3600;

RainGrid make_grid(int rows, int cols, std::vector<double> values,
                   std::int64_t timestamp = 1717200000) {
  RainGrid g;
  g.values = std::move(values);
  g.rows = rows;
  g.cols = cols;
  g.lat0 = 44.0;
  g.lon0 = 8.0;
  g.dlat = 0.009;
  g.dlon = 0.013267;
  g.timestamp = timestamp;
  g.validate();
  return g;
}

LightningRecord strike_at(const RainGrid& g, int r, int c,
                          std::int64_t offset_s) {
  const LatLon p = g.cell_center(r, c);
  return {(g.timestamp + offset_s) * kMicrosPerSecond, p.lat, p.lon};
}

}  // namespace

TEST_CASE("components require strictly exceeding the threshold") {
  // One cell exactly at the threshold, one a hair above it.
  const RainGrid g = make_grid(1, 3, {50.0, 50.0 + 1e-9, 10.0});
  const auto comps = over_threshold_components(g, 50.0, 1, Connectivity::four);
  REQUIRE(comps.size() == 1);
  REQUIRE(comps[0].size() == 1);
  CHECK(comps[0][0] == PixelIndex{0, 1});
}

TEST_CASE("components respect the minimum size") {
  // 4x4: an L-shaped triple, a pair, and a lone cell, all over threshold.
  const RainGrid g = make_grid(4, 4,
                               {60, 0, 0, 70,   //
                                60, 60, 0, 0,   //
                                0, 0, 0, 0,     //
                                55, 55, 0, 0});
  const auto all = over_threshold_components(g, 50.0, 1, Connectivity::four);
  REQUIRE(all.size() == 3);
  const auto pairs = over_threshold_components(g, 50.0, 2, Connectivity::four);
  CHECK(pairs.size() == 2);
  const auto triples = over_threshold_components(g, 50.0, 3, Connectivity::four);
  REQUIRE(triples.size() == 1);
  const Component expected = {{0, 0}, {1, 0}, {1, 1}};
  CHECK(triples[0] == expected);
}

TEST_CASE("components come back row-major and ordered by first pixel") {
  const RainGrid g = make_grid(3, 4,
                               {0, 0, 60, 60,  //
                                60, 0, 0, 60,  //
                                60, 0, 0, 0});
  const auto comps = over_threshold_components(g, 50.0, 1, Connectivity::four);
  REQUIRE(comps.size() == 2);
  const Component right = {{0, 2}, {0, 3}, {1, 3}};
  const Component left = {{1, 0}, {2, 0}};
  CHECK(comps[0] == right);
  CHECK(comps[1] == left);
}

TEST_CASE("diagonal neighbors merge under eight-connectivity only") {
  const RainGrid g = make_grid(2, 2, {60, 0, 0, 60});
  CHECK(over_threshold_components(g, 50.0, 1, Connectivity::four).size() == 2);
  const auto eight = over_threshold_components(g, 50.0, 1, Connectivity::eight);
  REQUIRE(eight.size() == 1);
  CHECK(eight[0].size() == 2);
}

TEST_CASE("missing cells read as dry and split blobs") {
  const RainGrid g = make_grid(1, 3, {60, kNaN, 60});
  const auto comps = over_threshold_components(g, 50.0, 1, Connectivity::four);
  CHECK(comps.size() == 2);
  CHECK(g.missing_cells() == 1);
}

TEST_CASE("grid validation rejects inconsistent shapes") {
  RainGrid g = make_grid(2, 2, {1, 2, 3, 4});
  g.values.pop_back();
  CHECK_THROWS_AS(g.validate(), InputError);
  RainGrid neg = make_grid(1, 1, {0.0});
  neg.rows = -1;
  CHECK_THROWS_AS(neg.validate(), InputError);
  RainGrid rate = make_grid(1, 1, {0.5});
  rate.values[0] = -0.5;
  CHECK_THROWS_AS(rate.validate(), InputError);
  RainGrid flat = make_grid(1, 1, {0.0});
  flat.dlat = 0.0;
  CHECK_THROWS_AS(flat.validate(), InputError);
}

TEST_CASE("haversine matches reference values") {
  CHECK(haversine_km(44.0, 8.0, 44.0, 8.0) == doctest::Approx(0.0));
  // One degree of latitude spans R*pi/180 km on the great circle.
  const double per_degree = 6371.0 * std::numbers::pi / 180.0;
  CHECK(haversine_km(44.0, 8.0, 45.0, 8.0) ==
        doctest::Approx(per_degree).epsilon(1e-12));
  CHECK(haversine_km(44.0, 8.0, 44.5, 8.7) ==
        doctest::Approx(haversine_km(44.5, 8.7, 44.0, 8.0)).epsilon(1e-12));
}

TEST_CASE("haversine agrees with an atan2 formulation") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const double lat1 = 43.5 + rng.uniform01();
    const double lon1 = 7.5 + rng.uniform01();
    const double lat2 = lat1 + (rng.uniform01() - 0.5) * 0.4;
    const double lon2 = lon1 + (rng.uniform01() - 0.5) * 0.4;
    const double got = haversine_km(lat1, lon1, lat2, lon2);
    const double ref = oracle::haversine_atan2(lat1, lon1, lat2, lon2);
    CHECK(got == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("lightning rule counts strikes in a sliding window") {
  const RainGrid g = make_grid(1, 1, {60.0});
  const std::vector<LatLon> pixels = {g.cell_center(0, 0)};

  SUBCASE("ten strikes inside ten minutes qualify") {
    std::vector<LightningRecord> strikes;
    for (int i = 0; i < 10; ++i) strikes.push_back(strike_at(g, 0, 0, i * 61));
    CHECK(lightning_rule(pixels, strikes, 5.0, 10.0, 10));
  }
  SUBCASE("the same strikes stretched past the window fail") {
    std::vector<LightningRecord> strikes;
    for (int i = 0; i < 10; ++i) strikes.push_back(strike_at(g, 0, 0, i * 67));
    CHECK_FALSE(lightning_rule(pixels, strikes, 5.0, 10.0, 10));
    CHECK(lightning_rule(pixels, strikes, 5.0, 10.0, 9));
  }
  SUBCASE("the window is inclusive at both ends") {
    const std::vector<LightningRecord> edge = {strike_at(g, 0, 0, 0),
                                               strike_at(g, 0, 0, 600)};
    CHECK(lightning_rule(pixels, edge, 5.0, 10.0, 2));
    std::vector<LightningRecord> past = edge;
    past[1].time_us += 1;
    CHECK_FALSE(lightning_rule(pixels, past, 5.0, 10.0, 2));
  }
  SUBCASE("distant strikes never count") {
    std::vector<LightningRecord> strikes;
    for (int i = 0; i < 12; ++i) {
      auto s = strike_at(g, 0, 0, i * 10);
      s.lon += 1.0;  // ~80 km east, far outside any sane radius
      strikes.push_back(s);
    }
    CHECK_FALSE(lightning_rule(pixels, strikes, 5.0, 10.0, 10));
  }
  SUBCASE("input validation") {
    const std::vector<LightningRecord> two = {strike_at(g, 0, 0, 10),
                                              strike_at(g, 0, 0, 20)};
    CHECK_THROWS_AS(lightning_rule(pixels, two, 0.0, 10.0, 2), InputError);
    CHECK_THROWS_AS(lightning_rule(pixels, two, 5.0, 0.0, 2), InputError);
    CHECK_THROWS_AS(lightning_rule(pixels, two, 5.0, 10.0, 0), InputError);
    const std::vector<LightningRecord> unsorted = {strike_at(g, 0, 0, 20),
                                                   strike_at(g, 0, 0, 10)};
    CHECK_THROWS_AS(lightning_rule(pixels, unsorted, 5.0, 10.0, 2), InputError);
    CHECK_FALSE(lightning_rule({}, two, 5.0, 10.0, 2));
    CHECK_FALSE(lightning_rule(pixels, two, 5.0, 10.0, 3));
  }
}

TEST_CASE("lightning rule matches the brute-force scan") {
  Rng rng(57);
  const double radii[] = {1.0, 2.0, 5.0};
  const double windows[] = {1.0, 5.0, 10.0};
  int qualified = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n_pixels = 1 + static_cast<int>(rng.bounded(6));
    std::vector<LatLon> pixels;
    std::vector<oracle::PointRef> ref_pixels;
    for (int i = 0; i < n_pixels; ++i) {
      const double lat = 44.0 + (rng.uniform01() - 0.5) * 0.1;
      const double lon = 8.0 + (rng.uniform01() - 0.5) * 0.1;
      pixels.push_back({lat, lon});
      ref_pixels.push_back({lat, lon});
    }
    const int n_strikes = static_cast<int>(rng.bounded(31));
    std::vector<LightningRecord> strikes;
    for (int i = 0; i < n_strikes; ++i) {
      const double lat = 44.0 + (rng.uniform01() - 0.5) * 0.12;
      const double lon = 8.0 + (rng.uniform01() - 0.5) * 0.12;
      const auto t = static_cast<std::int64_t>(
          rng.uniform01() * 1200.0 * kMicrosPerSecond);
      strikes.push_back({t, lat, lon});
    }
    std::sort(strikes.begin(), strikes.end(),
              [](const LightningRecord& a, const LightningRecord& b) {
                return a.time_us < b.time_us;
              });
    std::vector<oracle::StrikeRef> ref_strikes;
    for (const auto& s : strikes) ref_strikes.push_back({s.time_us, s.lat, s.lon});

    const double radius = radii[rng.bounded(3)];
    const double window = windows[rng.bounded(3)];
    const int min_count = 1 + static_cast<int>(rng.bounded(12));
    const bool got = lightning_rule(pixels, strikes, radius, window, min_count);
    const bool want = oracle::lightning_rule(ref_pixels, ref_strikes, radius,
                                             static_cast<int>(window), min_count);
    CHECK(got == want);
    if (got) ++qualified;
  }
  // The trial mix must exercise both outcomes.
  CHECK(qualified > 50);
  CHECK(qualified < 450);
}

TEST_CASE("an hour labels severe when a component attracts a dense burst") {
  // 6x8 grid, one 2x2 block over threshold.
  std::vector<double> v(48, 0.0);
  for (int r = 2; r <= 3; ++r)
    for (int c = 3; c <= 4; ++c) v[r * 8 + c] = 60.0;
  const RainGrid g = make_grid(6, 8, v);

  std::vector<LightningRecord> strikes;
  for (int i = 0; i < 12; ++i) strikes.push_back(strike_at(g, 2, 3, 100 + i * 5));

  const EventLabel out = label_event(g, strikes);
  CHECK(out.label == 1);
  CHECK_FALSE(out.rain_only);
  CHECK(out.timestamp == g.timestamp);
  const Component block = {{2, 3}, {2, 4}, {3, 3}, {3, 4}};
  CHECK(out.component_pixels == block);
  CHECK(out.missing_cells == 0);
}

TEST_CASE("too few strikes downgrade the hour to rain-only") {
  std::vector<double> v(48, 0.0);
  for (int r = 2; r <= 3; ++r)
    for (int c = 3; c <= 4; ++c) v[r * 8 + c] = 60.0;
  const RainGrid g = make_grid(6, 8, v);

  std::vector<LightningRecord> strikes;
  for (int i = 0; i < 9; ++i) strikes.push_back(strike_at(g, 2, 3, 100 + i * 5));

  const EventLabel out = label_event(g, strikes);
  CHECK(out.label == 0);
  CHECK(out.rain_only);
  // Rain-only hours still report where the surviving components sit.
  const Component block = {{2, 3}, {2, 4}, {3, 3}, {3, 4}};
  CHECK(out.component_pixels == block);
}

TEST_CASE("only strikes inside the label hour count") {
  std::vector<double> v(48, 0.0);
  for (int r = 2; r <= 3; ++r)
    for (int c = 3; c <= 4; ++c) v[r * 8 + c] = 60.0;
  const RainGrid g = make_grid(6, 8, v);

  SUBCASE("a burst in the next hour does not qualify this one") {
    std::vector<LightningRecord> strikes;
    for (int i = 0; i < 12; ++i)
      strikes.push_back(strike_at(g, 2, 3, kHour + 10 + i * 5));
    const EventLabel out = label_event(g, strikes);
    CHECK(out.label == 0);
    CHECK(out.rain_only);
  }
  SUBCASE("the hour start is included, the hour end is not") {
    std::vector<LightningRecord> nine;
    for (int i = 0; i < 9; ++i) nine.push_back(strike_at(g, 2, 3, 60 + i * 5));

    auto with_start = nine;
    with_start.insert(with_start.begin(), strike_at(g, 2, 3, 0));
    CHECK(label_event(g, with_start).label == 1);

    auto with_end = nine;
    with_end.push_back(strike_at(g, 2, 3, kHour));
    const EventLabel out = label_event(g, with_end);
    CHECK(out.label == 0);
    CHECK(out.rain_only);
  }
  SUBCASE("strike order does not matter; the hour filter sorts") {
    std::vector<LightningRecord> strikes;
    for (int i = 0; i < 12; ++i) strikes.push_back(strike_at(g, 2, 3, 100 + i * 5));
    std::reverse(strikes.begin(), strikes.end());
    CHECK(label_event(g, strikes).label == 1);
  }
}

TEST_CASE("hours without components are quiet, not rain-only") {
  const RainGrid g = make_grid(2, 2, {10, 20, kNaN, 0});
  std::vector<LightningRecord> strikes;
  for (int i = 0; i < 20; ++i) strikes.push_back(strike_at(g, 0, 0, i));
  const EventLabel out = label_event(g, strikes);
  CHECK(out.label == 0);
  CHECK_FALSE(out.rain_only);
  CHECK(out.component_pixels.empty());
  CHECK(out.missing_cells == 1);
}

TEST_CASE("label parameters are validated up front") {
  const RainGrid g = make_grid(1, 1, {0.0});
  LabelParams p;
  p.min_count = 0;
  CHECK_THROWS_AS(label_event(g, {}, p), InputError);
  p = LabelParams{};
  p.min_size = 0;
  CHECK_THROWS_AS(label_event(g, {}, p), InputError);
  p = LabelParams{};
  p.radius_km = -1.0;
  CHECK_THROWS_AS(label_event(g, {}, p), InputError);
  p = LabelParams{};
  p.window_min = 0.0;
  CHECK_THROWS_AS(label_event(g, {}, p), InputError);
  p = LabelParams{};
  p.thresh_mm_h = -5.0;
  CHECK_THROWS_AS(label_event(g, {}, p), InputError);
}

TEST_CASE("generated scenes label exactly as constructed") {
  const SceneCategory cats[] = {SceneCategory::qualifying,
                                SceneCategory::rain_only,
                                SceneCategory::isolated_pixel,
                                SceneCategory::null_scene};
  int per_category[4] = {0, 0, 0, 0};
  for (int i = 0; i < 300; ++i) {
    SceneConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    cfg.category = cats[i % 4];
    const Scene scene = generate_rain_lightning_scene(cfg);
    const EventLabel got = label_event(scene.grid, scene.strikes, cfg.params);
    CHECK(got.label == scene.expected.label);
    CHECK(got.rain_only == scene.expected.rain_only);
    CHECK(got.timestamp == scene.expected.timestamp);
    CHECK(got.component_pixels == scene.expected.component_pixels);
    CHECK(got.missing_cells == scene.expected.missing_cells);
    switch (cfg.category) {
      case SceneCategory::qualifying:
        CHECK(scene.expected.label == 1);
        break;
      case SceneCategory::rain_only:
        CHECK(scene.expected.label == 0);
        CHECK(scene.expected.rain_only);
        break;
      case SceneCategory::isolated_pixel:
        // A lone severe pixel is below any min_size >= 2, so never an event.
        CHECK(scene.expected.label == 0);
        break;
      case SceneCategory::null_scene:
        CHECK(scene.expected.label == 0);
        CHECK_FALSE(scene.expected.rain_only);
        break;
    }
    ++per_category[i % 4];
  }
  for (int n : per_category) CHECK(n == 75);
}

TEST_CASE("scene generation is deterministic in the seed") {
  SceneConfig cfg;
  cfg.seed = 77;
  cfg.category = SceneCategory::qualifying;
  const Scene a = generate_rain_lightning_scene(cfg);
  const Scene b = generate_rain_lightning_scene(cfg);
  // Missing cells are NaN, so compare the raw bytes rather than the values.
  REQUIRE(a.grid.values.size() == b.grid.values.size());
  CHECK(std::memcmp(a.grid.values.data(), b.grid.values.data(),
                    a.grid.values.size() * sizeof(double)) == 0);
  REQUIRE(a.strikes.size() == b.strikes.size());
  for (std::size_t i = 0; i < a.strikes.size(); ++i) {
    CHECK(a.strikes[i].time_us == b.strikes[i].time_us);
    CHECK(a.strikes[i].lat == b.strikes[i].lat);
    CHECK(a.strikes[i].lon == b.strikes[i].lon);
  }
}
