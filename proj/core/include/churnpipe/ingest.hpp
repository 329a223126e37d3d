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

#include <string>
#include <vector>

#include "churnpipe/records.hpp"

namespace churnpipe {

enum class SourceKind { kLogs, kTransactions, kMembers };

/// Per-source load statistics. Malformed rows (bad dates, unparseable
/// numbers) are rejected individually; the load hard-fails only when more
/// than `kMaxRejectFraction` of rows reject.
struct LoadStats {
  std::size_t rows_total = 0;
  std::size_t rows_rejected = 0;
};

inline constexpr double kMaxRejectFraction = 0.01;

std::vector<UserLogRecord> load_logs(const std::string& path,
                                     LoadStats* stats = nullptr);
std::vector<TransactionRecord> load_transactions(const std::string& path,
                                                 LoadStats* stats = nullptr);
std::vector<MemberRecord> load_members(const std::string& path,
                                       LoadStats* stats = nullptr);

/// Loads all three sources from `<dir>/{logs,transactions,members}.csv`
/// and returns them sorted. Does not clean.
Dataset load_dataset(const std::string& dir);

/// Writes the three sources back out as `{logs,transactions,members}.csv`
/// under `dir` (created if needed).
void write_dataset(const Dataset& dataset, const std::string& dir);

/// Removes outliers and normalizes missing values:
///   - seconds_played clipped to [0, 86400];
///   - birth_year outside [Y-90, Y-10] becomes missing, where Y is the
///     year of the latest event in the dataset;
///   - log/transaction rows for users absent from members are dropped;
///   - output re-sorted.
/// Total and idempotent.
Dataset clean(Dataset dataset);

/// Reference year used by clean()'s birth-year window: the year of the
/// latest log/transaction date, falling back to the latest registration.
int clean_reference_year(const Dataset& dataset);

}  // namespace churnpipe
