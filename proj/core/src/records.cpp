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

#include "churnpipe/records.hpp"

#include <algorithm>
#include <tuple>

namespace churnpipe {
namespace {

auto log_key(const UserLogRecord& r) { return std::tie(r.user_id, r.date); }

auto txn_key(const TransactionRecord& r) {
  // Date ties resolved by expiration so re-sorting is a stable identity.
  return std::tie(r.user_id, r.transaction_date, r.membership_expire_date);
}

}  // namespace

void Dataset::sort_records() {
  std::sort(members.begin(), members.end(),
            [](const MemberRecord& a, const MemberRecord& b) {
              return a.user_id < b.user_id;
            });
  std::sort(logs.begin(), logs.end(),
            [](const UserLogRecord& a, const UserLogRecord& b) {
              return log_key(a) < log_key(b);
            });
  std::sort(transactions.begin(), transactions.end(),
            [](const TransactionRecord& a, const TransactionRecord& b) {
              return txn_key(a) < txn_key(b);
            });
}

bool Dataset::is_sorted() const {
  return std::is_sorted(members.begin(), members.end(),
                        [](const MemberRecord& a, const MemberRecord& b) {
                          return a.user_id < b.user_id;
                        }) &&
         std::is_sorted(logs.begin(), logs.end(),
                        [](const UserLogRecord& a, const UserLogRecord& b) {
                          return log_key(a) < log_key(b);
                        }) &&
         std::is_sorted(
             transactions.begin(), transactions.end(),
             [](const TransactionRecord& a, const TransactionRecord& b) {
               return txn_key(a) < txn_key(b);
             });
}

}  // namespace churnpipe
