// Copyright 2026 The Churnpipe Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "churnpipe/date.hpp"

#include <array>
#include <cstdio>

#include "churnpipe/error.hpp"

namespace churnpipe {
namespace {

// Low-level civil-calendar conversions (proleptic Gregorian, epoch
// 1970-01-01). Standard era/year-of-era decomposition.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097LL + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  int year;
  int month;
  int day;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Civil{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
               static_cast<int>(d)};
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[static_cast<std::size_t>(m - 1)];
}

// Year bounds are a sanity check on parsed data, not a calendar limit.
constexpr int kMinYear = 1800;
constexpr int kMaxYear = 2200;

}  // namespace

bool CalendarDate::is_valid_ymd(int year, int month, int day) {
  if (year < kMinYear || year > kMaxYear) return false;
  if (month < 1 || month > 12) return false;
  return day >= 1 && day <= days_in_month(year, month);
}

bool CalendarDate::is_valid_yyyymmdd(std::int64_t ordinal) {
  const int day = static_cast<int>(ordinal % 100);
  const int month = static_cast<int>((ordinal / 100) % 100);
  const int year = static_cast<int>(ordinal / 10000);
  return is_valid_ymd(year, month, day);
}

CalendarDate CalendarDate::from_ymd(int year, int month, int day) {
  if (!is_valid_ymd(year, month, day)) {
    throw DataError("invalid calendar date: " + std::to_string(year) + "-" +
                    std::to_string(month) + "-" + std::to_string(day));
  }
  return CalendarDate(
      static_cast<std::int32_t>(days_from_civil(year, month, day)));
}

CalendarDate CalendarDate::from_yyyymmdd(std::int64_t ordinal) {
  if (!is_valid_yyyymmdd(ordinal)) {
    throw DataError("invalid yyyymmdd date: " + std::to_string(ordinal));
  }
  return from_ymd(static_cast<int>(ordinal / 10000),
                  static_cast<int>((ordinal / 100) % 100),
                  static_cast<int>(ordinal % 100));
}

CalendarDate CalendarDate::from_day_number(std::int32_t days_since_epoch) {
  return CalendarDate(days_since_epoch);
}

CalendarDate CalendarDate::distant_past() {
  return from_ymd(kMinYear, 1, 1);
}

int CalendarDate::year() const { return civil_from_days(days_).year; }
int CalendarDate::month() const { return civil_from_days(days_).month; }
int CalendarDate::day() const { return civil_from_days(days_).day; }

std::int64_t CalendarDate::to_yyyymmdd() const {
  const Civil c = civil_from_days(days_);
  return static_cast<std::int64_t>(c.year) * 10000 + c.month * 100 + c.day;
}

std::string CalendarDate::to_string() const {
  const Civil c = civil_from_days(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
  return buf;
}

CalendarDate CalendarDate::month_start(int shift) const {
  const Civil c = civil_from_days(days_);
  int month_index = c.year * 12 + (c.month - 1) + shift;
  const int year = month_index / 12;
  int month = month_index % 12;
  if (month < 0) {
    month += 12;
    return from_ymd(year - 1, month + 1, 1);
  }
  return from_ymd(year, month + 1, 1);
}

CalendarDate CalendarDate::month_end(int shift) const {
  const CalendarDate first = month_start(shift);
  return from_ymd(first.year(), first.month(),
                  days_in_month(first.year(), first.month()));
}

}  // namespace churnpipe
