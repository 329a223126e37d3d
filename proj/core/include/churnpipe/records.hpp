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

#include <optional>
#include <string>
#include <vector>

#include "churnpipe/date.hpp"

namespace churnpipe {

using UserId = std::string;

/// One day of listening activity for one user.
struct UserLogRecord {
  UserId user_id;
  CalendarDate date;
  int num_unique_songs = 0;
  double seconds_played = 0.0;
  int login_count = 1;

  bool operator==(const UserLogRecord&) const = default;
};

/// One payment or subscription event: renewals, initial subscriptions,
/// and cancellations all appear here.
struct TransactionRecord {
  UserId user_id;
  CalendarDate transaction_date;
  CalendarDate membership_expire_date;
  int payment_plan_days = 0;
  double plan_list_price = 0.0;
  double actual_amount_paid = 0.0;
  bool is_auto_renew = false;
  bool is_cancel = false;

  bool operator==(const TransactionRecord&) const = default;
};

enum class Gender { kMale, kFemale };

struct MemberRecord {
  UserId user_id;
  CalendarDate registration_date;
  std::optional<int> birth_year;
  std::optional<Gender> gender;
  std::optional<int> city;
  std::optional<int> registered_via;

  bool operator==(const MemberRecord&) const = default;
};

/// The three joined sources. Logs and transactions are kept sorted by
/// (user_id, date); members by user_id.
struct Dataset {
  std::vector<MemberRecord> members;
  std::vector<UserLogRecord> logs;
  std::vector<TransactionRecord> transactions;

  void sort_records();
  bool is_sorted() const;

  bool operator==(const Dataset&) const = default;
};

}  // namespace churnpipe
