#pragma once

#include <cstdint>
#include <vector>

namespace stormwarn {

// Time-indexed binary actual labels at hourly cadence. mask[i] is 1 when the
// observation for slot i is present; masked slots stay in the series so that
// index distance keeps meaning time distance.
struct LabelSeries {
  std::vector<std::uint8_t> values;
  std::vector<std::int64_t> timestamps;  // POSIX seconds, strictly increasing
  std::vector<std::uint8_t> mask;

  std::size_t size() const { return values.size(); }

  // Throws InputError when the invariants fail: equal lengths, binary
  // values/mask, strictly increasing timestamps.
  void validate() const;

  std::size_t unmasked_count() const;
  std::size_t positives() const;  // unmasked positives
  std::size_t negatives() const;  // unmasked negatives

  // All-present series with hourly timestamps starting at t0.
  static LabelSeries hourly(std::vector<std::uint8_t> values, std::int64_t t0 = 0);

  // Index range [begin, end).
  LabelSeries slice(std::size_t begin, std::size_t end) const;
};

// Binary predictions aligned index-for-index with a LabelSeries.
struct PredictionSeries {
  std::vector<std::uint8_t> values;

  std::size_t size() const { return values.size(); }
};

}  // namespace stormwarn
