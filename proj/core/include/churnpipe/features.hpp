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

#ifndef CHURNPIPE_FEATURES_HPP_
#define CHURNPIPE_FEATURES_HPP_

#include <cstdint>
#include <vector>

#include "churnpipe/date.hpp"
#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/feature_spec.hpp"
#include "churnpipe/records.hpp"
#include "churnpipe/temporal.hpp"

namespace churnpipe {

// One dated observation feeding a windowed aggregation. For date-valued
// signals `value` holds the observed date's day number; it is encoded to
// relative days or a yyyymmdd ordinal only after aggregation.
struct Event {
  std::int32_t day = 0;  // day number of the observation itself
  double value = 0.0;

  bool operator==(const Event&) const = default;
};

// Concrete inclusive [lo, hi] day range a window resolves to under a
// period's anchor.
struct ResolvedWindow {
  std::int32_t lo = 0;
  std::int32_t hi = 0;
};

// Resolves a window against the period. Every resolved window must satisfy
// hi <= anchor; a window reaching past the anchor would let future data
// leak into the features, so it is a hard ConfigError.
ResolvedWindow resolve_window(const Window& window, const TimePeriod& period);

// Aggregates the sorted per-user event stream under the spec's window and
// aggregation, then applies the spec's temporal encoding. Empty windows
// yield 0 for sum/count and the missing sentinel otherwise; days_since_last
// considers only events with a nonzero value (an is_cancel stream holds 0/1
// flags, and only the 1s are cancellations).
double window_aggregate(const std::vector<Event>& events,
                        const FeatureSpec& spec, const TimePeriod& period);

// Recent-vs-prior comparison. Missing operands propagate; a ratio with a
// zero or missing denominator is missing rather than infinite.
double trend(double value_recent, double value_prior, TransformOp op);

// Builds the users x features matrix for one period. Rows follow
// `population` order; columns follow catalog order. Meta specs are
// evaluated after their operands. Output never contains infinities.
FeatureMatrix build_features(const Dataset& dataset,
                             const std::vector<FeatureSpec>& catalog,
                             const TimePeriod& period,
                             const std::vector<UserId>& population);

}  // namespace churnpipe

#endif  // CHURNPIPE_FEATURES_HPP_
