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

#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace churnpipe {

/// Daily-resolution Gregorian calendar date. The canonical internal form is
/// a signed day count from 1970-01-01, so ordering and day arithmetic are
/// plain integer operations. Round-trips losslessly through the yyyymmdd
/// integer form used by the raw data files.
class CalendarDate {
 public:
  CalendarDate() = default;

  static CalendarDate from_ymd(int year, int month, int day);
  static CalendarDate from_yyyymmdd(std::int64_t ordinal);
  static CalendarDate from_day_number(std::int32_t days_since_epoch);

  static bool is_valid_ymd(int year, int month, int day);
  static bool is_valid_yyyymmdd(std::int64_t ordinal);

  // Sentinel far in the past, used as the open lower bound of
  // "all history" windows.
  static CalendarDate distant_past();

  int year() const;
  int month() const;
  int day() const;
  std::int64_t to_yyyymmdd() const;
  std::int32_t day_number() const { return days_; }
  std::string to_string() const;  // "2017-01-25"

  CalendarDate add_days(int n) const { return from_day_number(days_ + n); }
  /// Whole days from other to this (positive when this is later).
  int days_since(CalendarDate other) const { return days_ - other.days_; }

  /// First day of the calendar month `shift` months away from this date's
  /// month (shift may be negative).
  CalendarDate month_start(int shift = 0) const;
  /// Last day of that same shifted month.
  CalendarDate month_end(int shift = 0) const;

  auto operator<=>(const CalendarDate&) const = default;

 private:
  explicit CalendarDate(std::int32_t days) : days_(days) {}
  std::int32_t days_ = 0;
};

}  // namespace churnpipe
