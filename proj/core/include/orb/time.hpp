#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace orb {

/// UTC timestamp at hour resolution, stored as hours since 1970-01-01T00:00Z.
struct UtcHour {
  std::int64_t hours = 0;

  auto operator<=>(const UtcHour&) const = default;

  UtcHour plus_hours(std::int64_t h) const { return UtcHour{hours + h}; }
  std::int64_t operator-(UtcHour other) const { return hours - other.hours; }
};

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (or "YYYY-MM-DDTHHZ"); minutes/seconds must be zero.
UtcHour parse_utc_hour(std::string_view iso);

/// Canonical form "YYYY-MM-DDTHH:00:00Z".
std::string format_utc_hour(UtcHour t);

/// Calendar year of the timestamp.
int utc_year(UtcHour t);

/// Hours since epoch for a civil date/hour (proleptic Gregorian).
std::int64_t hours_from_civil(int year, unsigned month, unsigned day, unsigned hour);

}  // namespace orb
