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

#ifndef CHURNPIPE_SELECTION_HPP_
#define CHURNPIPE_SELECTION_HPP_

#include <string>
#include <vector>

#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/gbdt.hpp"
#include "churnpipe/labeling.hpp"

namespace churnpipe {

// Accept a candidate only when it improves cross-validation log loss by
// more than this; suppresses acceptances within float noise.
inline constexpr double kDefaultSelectionEpsilon = 1e-5;

struct SelectionTrial {
  std::string feature_name;
  double cv_logloss_before = 0.0;
  double cv_logloss_after = 0.0;
  bool accepted = false;
};

struct SelectionReport {
  double baseline_cv_logloss = 0.0;  // prior-only model on the cv period
  std::vector<SelectionTrial> trials;
  std::vector<std::string> accepted;
};

// Walks the candidates in order; each trial retrains on accepted-so-far
// plus the candidate and keeps it iff cv log loss improves by more than
// epsilon. `seed_accepted` pre-loads the accepted set without trials.
// Deterministic for fixed params, order, and epsilon.
SelectionReport greedy_select(const std::vector<std::string>& candidates,
                              const FeatureMatrix& train_matrix,
                              const std::vector<int>& train_labels,
                              const FeatureMatrix& cv_matrix,
                              const std::vector<int>& cv_labels,
                              const GbdtParams& params,
                              double epsilon = kDefaultSelectionEpsilon,
                              const std::vector<std::string>& seed_accepted =
                                  {});

// Label-set convenience; every matrix row must be labeled.
SelectionReport greedy_select(const std::vector<std::string>& candidates,
                              const FeatureMatrix& train_matrix,
                              const LabelSet& train_labels,
                              const FeatureMatrix& cv_matrix,
                              const LabelSet& cv_labels,
                              const GbdtParams& params,
                              double epsilon = kDefaultSelectionEpsilon,
                              const std::vector<std::string>& seed_accepted =
                                  {});

// Pairwise Pearson correlation over rows where both features are present;
// any pair at or above the threshold drops the later-accepted feature.
// Returns the dropped names in accepted order.
std::vector<std::string> prune_correlated(
    const FeatureMatrix& matrix, const std::vector<std::string>& accepted,
    double threshold);

// Trials as CSV: feature_name,cv_logloss_before,cv_logloss_after,accepted.
void write_selection_report(const SelectionReport& report,
                            const std::string& path);

// The surviving feature list, one name per line; '#' lines carry metadata.
void write_accepted_features(const SelectionReport& report,
                             const std::vector<std::string>& final_set,
                             const std::string& path);
std::vector<std::string> read_accepted_features(const std::string& path);

}  // namespace churnpipe

#endif  // CHURNPIPE_SELECTION_HPP_
