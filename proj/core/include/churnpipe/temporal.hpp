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

#include <cstdint>
#include <string>

#include "churnpipe/date.hpp"

namespace churnpipe {

/// A contiguous date range with an anchor date. The anchor is the reference
/// point for relative features and the hard cutoff for the leakage guard:
/// no feature may read events dated after it. Defaults to the period's last
/// day, which is the only placement consistent with how relative features
/// shift between consecutive modeling months.
struct TimePeriod {
  std::string name;
  CalendarDate start;
  CalendarDate end;  // inclusive
  CalendarDate anchor;

  void validate() const;
  bool contains(CalendarDate d) const { return start <= d && d <= end; }
  bool overlaps(const TimePeriod& other) const {
    return start <= other.end && other.start <= end;
  }

  static TimePeriod from_yyyymmdd(std::string name, std::int64_t start,
                                  std::int64_t end, std::int64_t anchor);
};

struct PeriodSplits {
  TimePeriod train;
  TimePeriod cv;
  TimePeriod test;
};

/// The standard monthly split: train on January 2017, cross-validate on
/// February, test on March. Anchors default to each period's end date.
PeriodSplits default_periods();

/// Day offset of `event` measured backwards from `anchor`: positive when
/// the event precedes the anchor. This is the relative encoding that keeps
/// a date feature comparable across modeling periods.
inline int relative_days(CalendarDate event, CalendarDate anchor) {
  return anchor.days_since(event);
}

/// Ordinal yyyymmdd encoding, used when the calendar position itself
/// carries signal (e.g. registrations right after a holiday).
inline std::int64_t absolute_ordinal(CalendarDate event) {
  return event.to_yyyymmdd();
}

}  // namespace churnpipe
