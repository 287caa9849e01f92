#include "stormwarn/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stormwarn/errors.hpp"
#include "stormwarn/geo.hpp"
#include "stormwarn/time.hpp"

namespace stormwarn {

std::size_t RainGrid::missing_cells() const {
  std::size_t n = 0;
  for (double v : values) n += std::isnan(v) ? 1 : 0;
  return n;
}

void RainGrid::validate() const {
  if (rows < 0 || cols < 0) throw InputError("raster dimensions cannot be negative");
  if (values.size() !=
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InputError("raster value count does not match rows*cols");
  if (!(dlat > 0.0) || !(dlon > 0.0))
    throw InputError("raster cell steps must be positive");
  for (double v : values)
    if (!std::isnan(v) && v < 0.0)
      throw InputError("rain rates cannot be negative");
}

void LabelParams::validate() const {
  if (!(thresh_mm_h > 0.0)) throw InputError("rain threshold must be positive");
  if (min_size < 1) throw InputError("minimum component size must be at least 1");
  if (!(radius_km > 0.0)) throw InputError("strike radius must be positive");
  if (!(window_min > 0.0)) throw InputError("strike window must be positive");
  if (min_count < 1) throw InputError("minimum strike count must be at least 1");
}

std::vector<Component> over_threshold_components(const RainGrid& grid,
                                                 double thresh_mm_h,
                                                 int min_size,
                                                 Connectivity connectivity) {
  grid.validate();
  if (grid.rows == 0 || grid.cols == 0) throw InputError("raster is empty");
  if (!(thresh_mm_h > 0.0)) throw InputError("rain threshold must be positive");
  if (min_size < 1) throw InputError("minimum component size must be at least 1");

  const int rows = grid.rows, cols = grid.cols;
  auto over = [&](int r, int c) {
    const double v = grid.at(r, c);          // NaN compares false: missing is dry
    return v > thresh_mm_h;
  };

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(rows) *
                                     static_cast<std::size_t>(cols),
                                 0);
  auto idx = [&](int r, int c) {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c);
  };

  static constexpr int kFour[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  static constexpr int kEight[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                       {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  const auto* moves = connectivity == Connectivity::four ? kFour : kEight;
  const int n_moves = connectivity == Connectivity::four ? 4 : 8;

  std::vector<Component> components;
  std::vector<PixelIndex> stack;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (seen[idx(r, c)] || !over(r, c)) continue;
      Component comp;
      stack.assign(1, {r, c});
      seen[idx(r, c)] = 1;
      while (!stack.empty()) {
        const PixelIndex p = stack.back();
        stack.pop_back();
        comp.push_back(p);
        for (int m = 0; m < n_moves; ++m) {
          const int nr = p.row + moves[m][0];
          const int nc = p.col + moves[m][1];
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          if (seen[idx(nr, nc)] || !over(nr, nc)) continue;
          seen[idx(nr, nc)] = 1;
          stack.push_back({nr, nc});
        }
      }
      if (static_cast<int>(comp.size()) < min_size) continue;
      std::sort(comp.begin(), comp.end(), [](const PixelIndex& a, const PixelIndex& b) {
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
      });
      components.push_back(std::move(comp));
    }
  }
  return components;
}

bool lightning_rule(std::span<const LatLon> pixels,
                    std::span<const LightningRecord> strikes, double radius_km,
                    double window_min, int min_count) {
  if (!(radius_km > 0.0)) throw InputError("strike radius must be positive");
  if (!(window_min > 0.0)) throw InputError("strike window must be positive");
  if (min_count < 1) throw InputError("minimum strike count must be at least 1");
  for (std::size_t i = 1; i < strikes.size(); ++i)
    if (strikes[i].time_us < strikes[i - 1].time_us)
      throw InputError("strikes must be time-sorted");
  if (pixels.empty() || static_cast<int>(strikes.size()) < min_count)
    return false;

  std::vector<std::int64_t> near;
  near.reserve(strikes.size());
  for (const auto& s : strikes) {
    for (const auto& p : pixels) {
      if (haversine_km(s.lat, s.lon, p.lat, p.lon) <= radius_km) {
        near.push_back(s.time_us);
        break;
      }
    }
  }
  if (static_cast<int>(near.size()) < min_count) return false;

  const auto span_us =
      static_cast<std::int64_t>(window_min * 60.0 * kMicrosPerSecond);
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < near.size(); ++hi) {
    while (near[hi] - near[lo] > span_us) ++lo;
    if (hi - lo + 1 >= static_cast<std::size_t>(min_count)) return true;
  }
  return false;
}

EventLabel label_event(const RainGrid& grid,
                       std::span<const LightningRecord> strikes,
                       const LabelParams& params) {
  params.validate();
  EventLabel out;
  out.timestamp = grid.timestamp;
  out.missing_cells = grid.missing_cells();

  const std::vector<Component> components = over_threshold_components(
      grid, params.thresh_mm_h, params.min_size, params.connectivity);
  if (components.empty()) return out;

  // Restrict strikes to the label hour, then sort; the rule needs order only.
  const std::int64_t hour_begin = grid.timestamp * kMicrosPerSecond;
  const std::int64_t hour_end = hour_begin + kHourSeconds * kMicrosPerSecond;
  std::vector<LightningRecord> in_hour;
  for (const auto& s : strikes)
    if (s.time_us >= hour_begin && s.time_us < hour_end) in_hour.push_back(s);
  std::sort(in_hour.begin(), in_hour.end(),
            [](const LightningRecord& a, const LightningRecord& b) {
              return a.time_us < b.time_us;
            });

  std::vector<LatLon> centers;
  bool any_pass = false;
  std::vector<const Component*> passing;
  for (const auto& comp : components) {
    centers.clear();
    centers.reserve(comp.size());
    for (const auto& p : comp) centers.push_back(grid.cell_center(p.row, p.col));
    if (lightning_rule(centers, in_hour, params.radius_km, params.window_min,
                       params.min_count)) {
      any_pass = true;
      passing.push_back(&comp);
    }
  }

  if (any_pass) {
    out.label = 1;
    for (const Component* comp : passing)
      out.component_pixels.insert(out.component_pixels.end(), comp->begin(),
                                  comp->end());
  } else {
    out.rain_only = true;
    for (const auto& comp : components)
      out.component_pixels.insert(out.component_pixels.end(), comp.begin(),
                                  comp.end());
  }
  return out;
}

}  // namespace stormwarn
