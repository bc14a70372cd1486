#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace chronocast {

/// Calendar-offset aliases supported for regular time grids.
enum class Frequency { Yearly, Quarterly, Monthly, Weekly, Daily, Hourly };

char frequency_code(Frequency f);
std::optional<Frequency> frequency_from_code(char c);
std::optional<Frequency> frequency_from_string(const std::string& s);

/// Seasonal period implied by the frequency: Y=1, Q=4, M=12, W=1, D=7, H=24.
int seasonality(Frequency f);

/// Civil timestamp, second resolution. No timezone: values are taken as-is.
struct DateTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;

  bool operator==(const DateTime&) const = default;
};

/// Parses "YYYY-MM-DD" or "YYYY-MM-DD[T ]HH:MM[:SS]".
DateTime parse_timestamp(const std::string& text);

/// Formats date-only for Y/Q/M/W/D grids, "YYYY-MM-DDTHH:MM:SS" for hourly.
std::string format_timestamp(const DateTime& t, Frequency f);

/// Seconds since the Unix epoch, proleptic Gregorian, no leap seconds.
std::int64_t epoch_seconds(const DateTime& t);

/// Advances `t` by `steps` grid intervals. Month-based frequencies step by
/// calendar months with day-of-month clamped to the target month's length,
/// always measured from `t` itself so repeated regeneration from a series
/// start is stable (2020-01-31 + 2 months = 2020-03-31, not 03-29).
DateTime add_steps(const DateTime& t, Frequency f, std::int64_t steps);

}  // namespace chronocast
