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

#include <random>

#include "churnpipe/date.hpp"
#include "churnpipe/error.hpp"
#include "doctest.h"

using churnpipe::CalendarDate;

namespace {

// Independent day-count oracle: days since 1970-01-01 by brute counting
// from a fixed base, using only "is this a leap year" arithmetic.
bool oracle_is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int oracle_days_in_month(int y, int m) {
  static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && oracle_is_leap(y)) return 29;
  return kDays[m - 1];
}

long oracle_day_count(int y, int m, int d) {
  long days = 0;
  for (int year = 1970; year < y; ++year) days += oracle_is_leap(year) ? 366 : 365;
  for (int month = 1; month < m; ++month) days += oracle_days_in_month(y, month);
  return days + (d - 1);
}

}  // namespace

TEST_SUITE("date") {

TEST_CASE("ymd round-trips through yyyymmdd ordinals") {
  const CalendarDate d = CalendarDate::from_ymd(2017, 1, 25);
  CHECK(d.to_yyyymmdd() == 20170125);
  CHECK(d.year() == 2017);
  CHECK(d.month() == 1);
  CHECK(d.day() == 25);
  CHECK(CalendarDate::from_yyyymmdd(20170125) == d);
  CHECK(d.to_string() == "2017-01-25");
}

TEST_CASE("day numbers agree with a brute-force civil calendar") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> year(1995, 2035);
  std::uniform_int_distribution<int> month(1, 12);
  for (int i = 0; i < 500; ++i) {
    const int y = year(rng);
    const int m = month(rng);
    std::uniform_int_distribution<int> day(1, oracle_days_in_month(y, m));
    const int d = day(rng);
    const CalendarDate date = CalendarDate::from_ymd(y, m, d);
    const CalendarDate epoch = CalendarDate::from_ymd(1970, 1, 1);
    CHECK(date.days_since(epoch) == oracle_day_count(y, m, d));
    CHECK(CalendarDate::from_day_number(date.day_number()) == date);
  }
}

TEST_CASE("add_days and days_since are inverses") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> offset(-4000, 4000);
  const CalendarDate base = CalendarDate::from_ymd(2017, 2, 28);
  for (int i = 0; i < 200; ++i) {
    const int n = offset(rng);
    const CalendarDate shifted = base.add_days(n);
    CHECK(shifted.days_since(base) == n);
    CHECK(shifted.add_days(-n) == base);
  }
}

TEST_CASE("leap-year boundaries") {
  CHECK(CalendarDate::from_ymd(2016, 2, 29).to_yyyymmdd() == 20160229);
  CHECK(CalendarDate::from_ymd(2016, 2, 28).add_days(1) ==
        CalendarDate::from_ymd(2016, 2, 29));
  CHECK(CalendarDate::from_ymd(2017, 2, 28).add_days(1) ==
        CalendarDate::from_ymd(2017, 3, 1));
  CHECK(CalendarDate::from_ymd(2000, 2, 29).to_yyyymmdd() == 20000229);
  CHECK_FALSE(CalendarDate::is_valid_ymd(1900, 2, 29));
  CHECK_FALSE(CalendarDate::is_valid_ymd(2017, 2, 29));
}

TEST_CASE("month_start and month_end honor shifts") {
  const CalendarDate d = CalendarDate::from_ymd(2017, 3, 17);
  CHECK(d.month_start() == CalendarDate::from_ymd(2017, 3, 1));
  CHECK(d.month_end() == CalendarDate::from_ymd(2017, 3, 31));
  CHECK(d.month_start(-1) == CalendarDate::from_ymd(2017, 2, 1));
  CHECK(d.month_end(-1) == CalendarDate::from_ymd(2017, 2, 28));
  CHECK(d.month_start(-3) == CalendarDate::from_ymd(2016, 12, 1));
  CHECK(d.month_end(10) == CalendarDate::from_ymd(2018, 1, 31));
  // February end snaps to 29 in leap years.
  CHECK(CalendarDate::from_ymd(2016, 2, 3).month_end() ==
        CalendarDate::from_ymd(2016, 2, 29));
}

TEST_CASE("invalid ordinals are rejected") {
  CHECK_FALSE(CalendarDate::is_valid_yyyymmdd(20170230));
  CHECK_FALSE(CalendarDate::is_valid_yyyymmdd(20171301));
  CHECK_FALSE(CalendarDate::is_valid_yyyymmdd(2017));
  CHECK(CalendarDate::is_valid_yyyymmdd(20170228));
  CHECK_THROWS_AS(CalendarDate::from_yyyymmdd(20170231),
                  churnpipe::DataError);
  CHECK_THROWS_AS(CalendarDate::from_ymd(2017, 0, 1), churnpipe::DataError);
}

TEST_CASE("distant_past precedes any working date") {
  CHECK(CalendarDate::distant_past() < CalendarDate::from_ymd(1970, 1, 1));
  CHECK(CalendarDate::distant_past() < CalendarDate::from_ymd(2017, 1, 1));
}

}  // TEST_SUITE
