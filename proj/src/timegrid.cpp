#include "chronocast/timegrid.hpp"

#include <cctype>
#include <cstdio>

#include "chronocast/error.hpp"

namespace chronocast {

char frequency_code(Frequency f) {
  switch (f) {
    case Frequency::Yearly: return 'Y';
    case Frequency::Quarterly: return 'Q';
    case Frequency::Monthly: return 'M';
    case Frequency::Weekly: return 'W';
    case Frequency::Daily: return 'D';
    case Frequency::Hourly: return 'H';
  }
  return '?';
}

std::optional<Frequency> frequency_from_code(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'Y': return Frequency::Yearly;
    case 'Q': return Frequency::Quarterly;
    case 'M': return Frequency::Monthly;
    case 'W': return Frequency::Weekly;
    case 'D': return Frequency::Daily;
    case 'H': return Frequency::Hourly;
    default: return std::nullopt;
  }
}

std::optional<Frequency> frequency_from_string(const std::string& s) {
  if (s.size() == 1) return frequency_from_code(s[0]);
  return std::nullopt;
}

int seasonality(Frequency f) {
  switch (f) {
    case Frequency::Yearly: return 1;
    case Frequency::Quarterly: return 4;
    case Frequency::Monthly: return 12;
    case Frequency::Weekly: return 1;
    case Frequency::Daily: return 7;
    case Frequency::Hourly: return 24;
  }
  return 1;
}

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lengths[m - 1];
}

// Howard Hinnant's civil-days algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

bool parse_int(const std::string& s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

DateTime add_months(const DateTime& t, std::int64_t months) {
  std::int64_t linear = static_cast<std::int64_t>(t.year) * 12 + (t.month - 1) + months;
  DateTime r = t;
  r.year = static_cast<int>(linear >= 0 ? linear / 12 : (linear - 11) / 12);
  r.month = static_cast<int>(linear - static_cast<std::int64_t>(r.year) * 12) + 1;
  if (r.day > days_in_month(r.year, r.month)) r.day = days_in_month(r.year, r.month);
  return r;
}

}  // namespace

DateTime parse_timestamp(const std::string& text) {
  DateTime t;
  const auto bad = [&]() -> DateTime {
    fail(ErrorCode::UnparseableTimestamp, "cannot parse timestamp '" + text + "'");
  };
  if (!parse_int(text, 0, 4, t.year) || text.size() < 10 || text[4] != '-' || text[7] != '-' ||
      !parse_int(text, 5, 2, t.month) || !parse_int(text, 8, 2, t.day))
    return bad();
  if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > days_in_month(t.year, t.month))
    return bad();
  if (text.size() == 10) return t;
  if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      !parse_int(text, 11, 2, t.hour) || !parse_int(text, 14, 2, t.minute))
    return bad();
  if (text.size() > 16) {
    if (text.size() != 19 || text[16] != ':' || !parse_int(text, 17, 2, t.second)) return bad();
  }
  if (t.hour > 23 || t.minute > 59 || t.second > 59) return bad();
  return t;
}

std::string format_timestamp(const DateTime& t, Frequency f) {
  char buf[32];
  if (f == Frequency::Hourly) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", t.year, t.month, t.day,
                  t.hour, t.minute, t.second);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", t.year, t.month, t.day);
  }
  return buf;
}

std::int64_t epoch_seconds(const DateTime& t) {
  return days_from_civil(t.year, t.month, t.day) * 86400 + t.hour * 3600 + t.minute * 60 +
         t.second;
}

DateTime add_steps(const DateTime& t, Frequency f, std::int64_t steps) {
  switch (f) {
    case Frequency::Yearly: return add_months(t, steps * 12);
    case Frequency::Quarterly: return add_months(t, steps * 3);
    case Frequency::Monthly: return add_months(t, steps);
    case Frequency::Weekly:
    case Frequency::Daily: {
      std::int64_t days = days_from_civil(t.year, t.month, t.day) +
                          steps * (f == Frequency::Weekly ? 7 : 1);
      DateTime r = t;
      civil_from_days(days, r.year, r.month, r.day);
      return r;
    }
    case Frequency::Hourly: {
      std::int64_t hours = days_from_civil(t.year, t.month, t.day) * 24 + t.hour + steps;
      std::int64_t days = hours >= 0 ? hours / 24 : (hours - 23) / 24;
      DateTime r = t;
      r.hour = static_cast<int>(hours - days * 24);
      civil_from_days(days, r.year, r.month, r.day);
      return r;
    }
  }
  return t;
}

}  // namespace chronocast
