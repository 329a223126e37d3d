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
#include <utility>
#include <vector>

#include "churnpipe/records.hpp"

namespace churnpipe {

/// Synthetic subscription service with a known churn process.
///
/// Every user carries a hidden churn propensity (a logistic function of
/// engagement, plan price and renewal mode). At each membership expiration
/// the user either renews within a few days or churns; most churning users
/// let their listening activity decay over the three weeks leading up to
/// the expiration they will not renew. That decay is the planted causal
/// footprint: login recency and short-versus-long window activity trends
/// are the features that can recover it.
///
/// Generated data ends at 2017-03-31 with `months` calendar months of
/// activity history before that; transactions continue 30 days past the
/// end so that March expirations have an observable renewal window.
struct SynthResult {
  Dataset dataset;
  /// Hidden per-user churn probability per expiration, sorted by user_id.
  std::vector<std::pair<UserId, double>> churn_odds;
};

/// Catalog feature that most directly reads the planted decay footprint.
inline constexpr const char* kPlantedSignalFeature = "days_since_last_login";

/// Deterministic for a fixed (n_users, months, seed). Throws ConfigError
/// when n_users < 1 or months < 1.
SynthResult generate_synthetic(int n_users, int months, std::uint64_t seed);

/// Writes `churn_odds.csv` (user_id, churn_odds) under `dir`.
void write_churn_odds(const SynthResult& result, const std::string& dir);

/// Reads it back, sorted by user_id.
std::vector<std::pair<UserId, double>> load_churn_odds(
    const std::string& path);

}  // namespace churnpipe
