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

#include "churnpipe/labeling.hpp"

#include <algorithm>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"

namespace churnpipe {

double LabelSet::churn_rate() const {
  if (labels.empty()) return 0.0;
  std::size_t churned = 0;
  for (const auto& [_, y] : labels) churned += static_cast<std::size_t>(y);
  return static_cast<double>(churned) / static_cast<double>(labels.size());
}

LabelSet label_churn(const std::vector<TransactionRecord>& transactions,
                     const TimePeriod& period) {
  period.validate();
  LabelSet out;
  out.period = period;

  std::size_t i = 0;
  const std::size_t n = transactions.size();
  while (i < n) {
    // One user's contiguous, date-sorted slice.
    std::size_t j = i;
    while (j < n && transactions[j].user_id == transactions[i].user_id) ++j;

    CalendarDate reference;
    bool has_reference = false;
    for (std::size_t k = i; k < j; ++k) {
      const CalendarDate e = transactions[k].membership_expire_date;
      if (period.contains(e) && (!has_reference || e > reference)) {
        reference = e;
        has_reference = true;
      }
    }

    if (has_reference) {
      const CalendarDate window_end = reference.add_days(kRenewalWindowDays);
      bool renewed = false;
      for (std::size_t k = i; k < j && !renewed; ++k) {
        const TransactionRecord& t = transactions[k];
        renewed = !t.is_cancel && t.transaction_date > reference &&
                  t.transaction_date <= window_end &&
                  t.membership_expire_date > reference;
      }
      out.labels[transactions[i].user_id] = renewed ? 0 : 1;
      out.expiration_used[transactions[i].user_id] = reference;
    }
    i = j;
  }
  return out;
}

LabelSplits relabel_all(const Dataset& dataset, const PeriodSplits& periods) {
  const TimePeriod* all[] = {&periods.train, &periods.cv, &periods.test};
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      if (all[a]->overlaps(*all[b])) {
        throw ConfigError("labeling periods overlap: '" + all[a]->name +
                          "' and '" + all[b]->name + "'");
      }
    }
  }
  return LabelSplits{label_churn(dataset.transactions, periods.train),
                     label_churn(dataset.transactions, periods.cv),
                     label_churn(dataset.transactions, periods.test)};
}

void write_labels(const LabelSet& labels, const std::string& path) {
  CsvWriter w(path, {"user_id", "is_churn", "expiration"});
  for (const auto& [uid, y] : labels.labels) {
    w.write_row({uid, std::to_string(y),
                 std::to_string(labels.expiration_used.at(uid).to_yyyymmdd())});
  }
  w.close();
}

LabelSet read_labels(const std::string& path) {
  CsvReader reader(path);
  const int c_user = reader.column_index("user_id");
  const int c_churn = reader.column_index("is_churn");
  const int c_exp = reader.column_index("expiration");
  if (c_user < 0 || c_churn < 0) {
    throw DataError("labels file missing required columns: " + path);
  }
  LabelSet out;
  while (auto row = reader.next_row()) {
    const UserId uid = (*row)[c_user];
    out.labels[uid] = std::stoi((*row)[c_churn]);
    if (c_exp >= 0 && !(*row)[c_exp].empty()) {
      out.expiration_used[uid] =
          CalendarDate::from_yyyymmdd(std::stoll((*row)[c_exp]));
    }
  }
  return out;
}

}  // namespace churnpipe
