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

#ifndef CHURNPIPE_EVALUATE_HPP_
#define CHURNPIPE_EVALUATE_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/records.hpp"

namespace churnpipe {

// Predictions at exactly 0 or 1 are clipped this far inside (0, 1) so the
// loss stays finite for every input.
inline constexpr double kDefaultClipEps = 1e-15;

// Negative mean Bernoulli log-likelihood:
//   -(1/N) * sum_i [ y_i ln p_i + (1 - y_i) ln(1 - p_i) ]
// with each p_i clipped to [clip_eps, 1 - clip_eps] first.
double log_loss(const std::vector<int>& labels,
                const std::vector<double>& preds,
                double clip_eps = kDefaultClipEps);

// One model in a weighted-average ensemble, referenced by its on-disk file.
struct EnsembleMember {
  std::string model_path;
  double weight = 0.0;
};

struct EnsembleSpec {
  std::vector<EnsembleMember> members;

  // ConfigError unless there is at least one member, all weights are >= 0,
  // and the weights sum to 1 within 1e-9.
  void validate() const;
};

// Elementwise probability-space blend: out[i] = sum_j weights[j] *
// member_preds[j][i]. Member prediction vectors must agree in length and
// weights must pass the EnsembleSpec rules.
std::vector<double> weighted_average(
    const std::vector<std::vector<double>>& member_preds,
    const std::vector<double>& weights);

// Loads every member model, predicts on the matrix, and blends. The matrix
// columns must match each model's feature names.
std::vector<double> ensemble_predict(const EnsembleSpec& spec,
                                     const FeatureMatrix& matrix);

// Evaluation summary for one period.
struct EvalReport {
  std::string period_name;
  std::size_t n_users = 0;
  double log_loss_value = 0.0;   // headline score
  double churn_base_rate = 0.0;  // mean label
  // Per-model scores alongside the headline (e.g. each ensemble member).
  std::vector<std::pair<std::string, double>> model_scores;
  // Normalized gain shares, descending.
  std::vector<std::pair<std::string, double>> importance;
};

std::string format_report(const EvalReport& report);
void write_report_csv(const EvalReport& report, const std::string& path);

// Predictions CSV: header `user_id,is_churn_probability`, probabilities
// written with full round-trip precision.
void write_predictions_csv(const std::vector<UserId>& user_ids,
                           const std::vector<double>& preds,
                           const std::string& path);
std::vector<std::pair<UserId, double>> read_predictions_csv(
    const std::string& path);

}  // namespace churnpipe

#endif  // CHURNPIPE_EVALUATE_HPP_
