#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace stormwarn {

inline constexpr std::int64_t kHourSeconds = 3600;
inline constexpr std::int64_t kMicrosPerSecond = 1000000;

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d);

// Parses "YYYY-MM-DDTHH:MM:SS[.ffffff]Z" (UTC only) to microseconds since
// the epoch. Throws InputError on malformed input.
std::int64_t parse_iso8601_us(std::string_view s);

// Whole-second variant; rejects a nonzero fractional part.
std::int64_t parse_iso8601_s(std::string_view s);

std::string format_iso8601_s(std::int64_t seconds);
std::string format_iso8601_us(std::int64_t micros);

}  // namespace stormwarn
