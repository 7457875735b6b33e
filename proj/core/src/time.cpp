#include "orb/time.hpp"

#include <charconv>
#include <cstdio>

#include "orb/errors.hpp"

namespace orb {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
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

int parse_int_at(std::string_view s, size_t pos, size_t len, const char* field) {
  if (pos + len > s.size()) throw ParseError(field, "timestamp too short: '" + std::string(s) + "'");
  int v = 0;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc() || p != s.data() + pos + len)
    throw ParseError(field, "bad timestamp '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::int64_t hours_from_civil(int year, unsigned month, unsigned day, unsigned hour) {
  return days_from_civil(year, month, day) * 24 + hour;
}

UtcHour parse_utc_hour(std::string_view iso) {
  // YYYY-MM-DDTHH[:MM[:SS]]Z
  if (iso.size() < 12 || iso[4] != '-' || iso[7] != '-' || (iso[10] != 'T' && iso[10] != ' '))
    throw ParseError("time", "bad timestamp '" + std::string(iso) + "'");
  int year = parse_int_at(iso, 0, 4, "time");
  int month = parse_int_at(iso, 5, 2, "time");
  int day = parse_int_at(iso, 8, 2, "time");
  int hour = parse_int_at(iso, 11, 2, "time");
  size_t pos = 13;
  int minute = 0, second = 0;
  if (pos < iso.size() && iso[pos] == ':') {
    minute = parse_int_at(iso, pos + 1, 2, "time");
    pos += 3;
    if (pos < iso.size() && iso[pos] == ':') {
      second = parse_int_at(iso, pos + 1, 2, "time");
      pos += 3;
    }
  }
  if (pos >= iso.size() || iso[pos] != 'Z' || pos + 1 != iso.size())
    throw ParseError("time", "timestamp must be UTC ('Z' suffix): '" + std::string(iso) + "'");
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 || hour > 23)
    throw ParseError("time", "timestamp out of range: '" + std::string(iso) + "'");
  if (minute != 0 || second != 0)
    throw ParseError("time", "sub-hour timestamps not supported: '" + std::string(iso) + "'");
  return UtcHour{hours_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day),
                                  static_cast<unsigned>(hour))};
}

std::string format_utc_hour(UtcHour t) {
  std::int64_t days = t.hours / 24;
  std::int64_t hour = t.hours % 24;
  if (hour < 0) {
    hour += 24;
    days -= 1;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:00:00Z", y, m, d, static_cast<int>(hour));
  return buf;
}

int utc_year(UtcHour t) {
  std::int64_t days = t.hours / 24;
  if (t.hours % 24 < 0) days -= 1;
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  return y;
}

}  // namespace orb
