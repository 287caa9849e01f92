#include "stormwarn/time.hpp"

#include <cstdio>

#include "stormwarn/errors.hpp"

namespace stormwarn {

namespace {

[[noreturn]] void bad_timestamp(std::string_view s) {
  throw InputError("malformed ISO-8601 UTC timestamp: '" + std::string(s) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

std::int64_t parse_iso8601_us(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.f{1..6}]Z
  if (s.size() < 20 || s.back() != 'Z') bad_timestamp(s);
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':')
    bad_timestamp(s);
  std::string_view ys = s.substr(0, 4), mos = s.substr(5, 2), ds = s.substr(8, 2);
  std::string_view hs = s.substr(11, 2), mis = s.substr(14, 2), ss = s.substr(17, 2);
  if (!all_digits(ys) || !all_digits(mos) || !all_digits(ds) ||
      !all_digits(hs) || !all_digits(mis) || !all_digits(ss))
    bad_timestamp(s);

  std::int64_t frac_us = 0;
  if (s.size() > 20) {
    if (s[19] != '.') bad_timestamp(s);
    std::string_view frac = s.substr(20, s.size() - 21);
    if (frac.size() < 1 || frac.size() > 6 || !all_digits(frac)) bad_timestamp(s);
    frac_us = to_int(frac);
    for (std::size_t k = frac.size(); k < 6; ++k) frac_us *= 10;
  }

  const int year = to_int(ys);
  const unsigned month = static_cast<unsigned>(to_int(mos));
  const unsigned day = static_cast<unsigned>(to_int(ds));
  const int hour = to_int(hs), minute = to_int(mis), second = to_int(ss);
  if (month < 1 || month > 12 || day < 1 || day > 31) bad_timestamp(s);
  if (hour > 23 || minute > 59 || second > 60) bad_timestamp(s);

  const std::int64_t days = days_from_civil(year, month, day);
  return ((days * 24 + hour) * 60 + minute) * 60 * kMicrosPerSecond +
         static_cast<std::int64_t>(second) * kMicrosPerSecond + frac_us;
}

std::int64_t parse_iso8601_s(std::string_view s) {
  const std::int64_t us = parse_iso8601_us(s);
  if (us % kMicrosPerSecond != 0)
    throw InputError("timestamp has unexpected sub-second precision: '" +
                     std::string(s) + "'");
  return us / kMicrosPerSecond;
}

std::string format_iso8601_s(std::int64_t seconds) {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::string format_iso8601_us(std::int64_t micros) {
  std::int64_t sec = micros / kMicrosPerSecond;
  std::int64_t frac = micros % kMicrosPerSecond;
  if (frac < 0) {
    frac += kMicrosPerSecond;
    sec -= 1;
  }
  std::string base = format_iso8601_s(sec);
  char buf[16];
  std::snprintf(buf, sizeof(buf), ".%06d", static_cast<int>(frac));
  base.insert(base.size() - 1, buf);  // before the trailing 'Z'
  return base;
}

}  // namespace stormwarn
