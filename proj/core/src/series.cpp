#include "stormwarn/series.hpp"

#include "stormwarn/errors.hpp"
#include "stormwarn/time.hpp"

namespace stormwarn {

void LabelSeries::validate() const {
  if (timestamps.size() != values.size() || mask.size() != values.size())
    throw InputError("label series: values, timestamps and mask lengths differ");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1) throw InputError("label series: values must be 0 or 1");
    if (mask[i] > 1) throw InputError("label series: mask must be 0 or 1");
    if (i > 0 && timestamps[i] <= timestamps[i - 1])
      throw InputError("label series: timestamps must be strictly increasing");
  }
}

std::size_t LabelSeries::unmasked_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) n += mask[i] != 0;
  return n;
}

std::size_t LabelSeries::positives() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) n += mask[i] && values[i];
  return n;
}

std::size_t LabelSeries::negatives() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) n += mask[i] && !values[i];
  return n;
}

LabelSeries LabelSeries::hourly(std::vector<std::uint8_t> values, std::int64_t t0) {
  LabelSeries s;
  s.timestamps.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    s.timestamps[i] = t0 + static_cast<std::int64_t>(i) * kHourSeconds;
  s.mask.assign(values.size(), 1);
  s.values = std::move(values);
  return s;
}

LabelSeries LabelSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size())
    throw InputError("label series slice out of range");
  LabelSeries out;
  out.values.assign(values.begin() + begin, values.begin() + end);
  out.timestamps.assign(timestamps.begin() + begin, timestamps.begin() + end);
  out.mask.assign(mask.begin() + begin, mask.begin() + end);
  return out;
}

}  // namespace stormwarn
