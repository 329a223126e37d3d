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

#include <map>
#include <string>
#include <vector>

#include "churnpipe/records.hpp"
#include "churnpipe/temporal.hpp"

namespace churnpipe {

/// Binary churn labels for one modeling period. A user is in the labeled
/// population iff they have a membership expiration inside the period; the
/// reference expiration is the latest such date.
struct LabelSet {
  TimePeriod period;
  std::map<UserId, int> labels;                    // 1 = churn
  std::map<UserId, CalendarDate> expiration_used;  // reference expiration

  std::size_t size() const { return labels.size(); }
  double churn_rate() const;
};

/// Number of days after the reference expiration within which a renewal
/// must land to count. The window is (E, E+30]: a transaction on day E
/// itself does not count, one on day E+30 does.
inline constexpr int kRenewalWindowDays = 30;

/// Labels every user whose membership expires within `period`. Label 0 iff
/// some non-cancel transaction dated in (E, E+30] extends membership past
/// E (membership_expire_date > E); label 1 otherwise. Transactions must be
/// sorted by (user_id, date).
LabelSet label_churn(const std::vector<TransactionRecord>& transactions,
                     const TimePeriod& period);

struct LabelSplits {
  LabelSet train;
  LabelSet cv;
  LabelSet test;
};

/// Computes fresh labels for all three periods independently. Periods must
/// be pairwise disjoint; any externally supplied labels are ignored.
LabelSplits relabel_all(const Dataset& dataset, const PeriodSplits& periods);

void write_labels(const LabelSet& labels, const std::string& path);
LabelSet read_labels(const std::string& path);

}  // namespace churnpipe
