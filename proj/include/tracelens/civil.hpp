// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "tracelens/errors.hpp"

// Fixed-offset calendar arithmetic. Timestamps are UTC epoch seconds; every
// wall-clock notion (hour of day, weekday, calendar day, date boundaries) is
// derived at a configurable fixed offset. No DST, no tz database.

namespace tracelens {

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

constexpr bool is_leap_year(int y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr int days_in_month(int y, int m) {
  constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return lengths[m - 1];
}

// Days since 1970-01-01 for a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr std::int64_t days_from_civil(const CivilDate& c) {
  return days_from_civil(c.year, c.month, c.day);
}

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                   static_cast<int>(d)};
}

// 0 = Monday .. 6 = Sunday. Day 0 (1970-01-01) was a Thursday.
constexpr int weekday_mon0(std::int64_t day) {
  return static_cast<int>(((day % 7) + 7 + 3) % 7);
}

constexpr const char* weekday_abbrev(int mon0) {
  constexpr const char* names[] = {"Mon", "Tue", "Wed", "Thu",
                                   "Fri", "Sat", "Sun"};
  return names[mon0];
}

// Fixed UTC offset, stored in minutes. Default +01:00 (CET winter time).
class TzOffset {
 public:
  constexpr TzOffset() = default;
  constexpr explicit TzOffset(int minutes) : minutes_(minutes) {}

  // Accepts "+HH:MM", "-HH:MM" or "Z".
  static TzOffset parse(std::string_view text) {
    if (text == "Z" || text == "z") return TzOffset(0);
    if (text.size() != 6 || (text[0] != '+' && text[0] != '-') ||
        text[3] != ':') {
      throw Error(Errc::bad_config,
                  "timezone offset must look like +HH:MM, got '" +
                      std::string(text) + "'");
    }
    auto digit_pair = [&](std::size_t at) -> int {
      char a = text[at], b = text[at + 1];
      if (a < '0' || a > '9' || b < '0' || b > '9') return -1;
      return (a - '0') * 10 + (b - '0');
    };
    int hours = digit_pair(1);
    int mins = digit_pair(4);
    if (hours < 0 || mins < 0 || hours > 14 || mins > 59) {
      throw Error(Errc::bad_config,
                  "timezone offset out of range: '" + std::string(text) + "'");
    }
    int total = hours * 60 + mins;
    return TzOffset(text[0] == '-' ? -total : total);
  }

  constexpr int minutes() const { return minutes_; }
  constexpr int seconds() const { return minutes_ * 60; }

  std::string to_string() const {
    int m = minutes_;
    char sign = '+';
    if (m < 0) {
      sign = '-';
      m = -m;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", sign, m / 60, m % 60);
    return buf;
  }

  friend bool operator==(const TzOffset&, const TzOffset&) = default;

 private:
  int minutes_ = 60;
};

// Local calendar day number (days since 1970-01-01 at the given offset).
inline std::int64_t local_day(double epoch_s, TzOffset tz) {
  return static_cast<std::int64_t>(
      std::floor((epoch_s + tz.seconds()) / 86400.0));
}

// Seconds past local midnight, in [0, 86400).
inline double local_seconds_of_day(double epoch_s, TzOffset tz) {
  double lsec = epoch_s + tz.seconds();
  return lsec - std::floor(lsec / 86400.0) * 86400.0;
}

inline int local_hour(double epoch_s, TzOffset tz) {
  int h = static_cast<int>(local_seconds_of_day(epoch_s, tz) / 3600.0);
  return h > 23 ? 23 : h;
}

inline double local_fractional_hour(double epoch_s, TzOffset tz) {
  return local_seconds_of_day(epoch_s, tz) / 3600.0;
}

// Hour slot within a Monday-first week, 0..167.
inline int local_hour_of_week(double epoch_s, TzOffset tz) {
  return weekday_mon0(local_day(epoch_s, tz)) * 24 + local_hour(epoch_s, tz);
}

// Epoch seconds of a local wall-clock instant.
constexpr std::int64_t epoch_from_local(const CivilDate& date, int hour,
                                        int minute, int second, TzOffset tz) {
  return days_from_civil(date) * 86400 + hour * 3600 + minute * 60 + second -
         tz.seconds();
}

inline std::string format_date(const CivilDate& c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

namespace detail {
inline bool parse_int_field(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}
}  // namespace detail

// Strict "YYYY-MM-DD".
inline std::optional<CivilDate> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  CivilDate c;
  if (!detail::parse_int_field(text.substr(0, 4), c.year) ||
      !detail::parse_int_field(text.substr(5, 2), c.month) ||
      !detail::parse_int_field(text.substr(8, 2), c.day)) {
    return std::nullopt;
  }
  if (c.month < 1 || c.month > 12 || c.day < 1 ||
      c.day > days_in_month(c.year, c.month)) {
    return std::nullopt;
  }
  return c;
}

// "YYYY-MM-DD", optionally followed by "THH:MM" or "THH:MM:SS". Returns local
// wall-clock converted to epoch seconds at the given offset.
inline std::optional<std::int64_t> parse_local_datetime(std::string_view text,
                                                        TzOffset tz) {
  if (text.size() < 10) return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  int hour = 0, minute = 0, second = 0;
  if (text.size() > 10) {
    std::string_view rest = text.substr(10);
    if (rest[0] != 'T' || (rest.size() != 6 && rest.size() != 9)) {
      return std::nullopt;
    }
    if (rest[3] != ':' || !detail::parse_int_field(rest.substr(1, 2), hour) ||
        !detail::parse_int_field(rest.substr(4, 2), minute)) {
      return std::nullopt;
    }
    if (rest.size() == 9) {
      if (rest[6] != ':' ||
          !detail::parse_int_field(rest.substr(7, 2), second)) {
        return std::nullopt;
      }
    }
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  }
  return epoch_from_local(*date, hour, minute, second, tz);
}

}  // namespace tracelens
