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

#include "churnpipe/temporal.hpp"

#include "churnpipe/error.hpp"

namespace churnpipe {

void TimePeriod::validate() const {
  if (start > end) {
    throw ConfigError("period '" + name + "': start " + start.to_string() +
                      " is after end " + end.to_string());
  }
  if (anchor < start || anchor > end) {
    throw ConfigError("period '" + name + "': anchor " + anchor.to_string() +
                      " outside [" + start.to_string() + ", " +
                      end.to_string() + "]");
  }
}

TimePeriod TimePeriod::from_yyyymmdd(std::string name, std::int64_t start,
                                     std::int64_t end, std::int64_t anchor) {
  TimePeriod p{std::move(name), CalendarDate::from_yyyymmdd(start),
               CalendarDate::from_yyyymmdd(end),
               CalendarDate::from_yyyymmdd(anchor)};
  p.validate();
  return p;
}

PeriodSplits default_periods() {
  return PeriodSplits{
      TimePeriod::from_yyyymmdd("train", 20170101, 20170131, 20170131),
      TimePeriod::from_yyyymmdd("cv", 20170201, 20170228, 20170228),
      TimePeriod::from_yyyymmdd("test", 20170301, 20170331, 20170331),
  };
}

}  // namespace churnpipe
