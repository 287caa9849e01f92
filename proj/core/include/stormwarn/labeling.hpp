#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stormwarn {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

// Hourly rain-rate raster, row-major, geo-referenced by the cell centers:
// cell (r, c) sits at (lat0 + r*dlat, lon0 + c*dlon). Missing cells are NaN
// and enter componentization as 0 mm/h.
struct RainGrid {
  std::vector<double> values;
  int rows = 0;
  int cols = 0;
  double lat0 = 0.0;
  double lon0 = 0.0;
  double dlat = 0.0;
  double dlon = 0.0;
  std::int64_t timestamp = 0;  // start of the label hour, POSIX seconds

  double at(int r, int c) const {
    return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(c)];
  }
  LatLon cell_center(int r, int c) const {
    return {lat0 + r * dlat, lon0 + c * dlon};
  }
  std::size_t missing_cells() const;
  void validate() const;
};

struct LightningRecord {
  std::int64_t time_us = 0;  // POSIX microseconds
  double lat = 0.0;
  double lon = 0.0;
};

struct PixelIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

using Component = std::vector<PixelIndex>;

enum class Connectivity { four, eight };

struct EventLabel {
  std::int64_t timestamp = 0;
  std::uint8_t label = 0;
  bool rain_only = false;
  std::vector<PixelIndex> component_pixels;
  std::size_t missing_cells = 0;
};

struct LabelParams {
  double thresh_mm_h = 50.0;
  int min_size = 3;
  Connectivity connectivity = Connectivity::four;
  double radius_km = 5.0;
  double window_min = 10.0;
  int min_count = 10;
  void validate() const;
};

// Connected components of cells with value strictly above thresh, keeping
// only components of at least min_size pixels. Each component is sorted
// row-major; components are ordered by their first pixel.
std::vector<Component> over_threshold_components(const RainGrid& grid,
                                                 double thresh_mm_h,
                                                 int min_size,
                                                 Connectivity connectivity);

// True iff at least min_count of the strikes land within radius_km of some
// pixel and fit together inside one sliding window of window_min minutes.
// Strikes must already be restricted to the label hour and time-sorted.
bool lightning_rule(std::span<const LatLon> pixels,
                    std::span<const LightningRecord> strikes, double radius_km,
                    double window_min, int min_count);

// label=1 iff some over-threshold component passes the lightning rule;
// rain_only flags hours whose components all fail it. component_pixels
// collects the passing components (all surviving ones for rain-only hours).
EventLabel label_event(const RainGrid& grid,
                       std::span<const LightningRecord> strikes,
                       const LabelParams& params = {});

}  // namespace stormwarn
