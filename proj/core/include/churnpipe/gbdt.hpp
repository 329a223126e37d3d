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

#ifndef CHURNPIPE_GBDT_HPP_
#define CHURNPIPE_GBDT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/labeling.hpp"

namespace churnpipe {

enum class GrowthStrategy {
  kDepthWise,  // expand the whole frontier level by level
  kLeafWise,   // always split the leaf with the highest gain next
};

enum class BaseScoreMode {
  kPriorLogodds,  // ln(p / (1 - p)) of the training label mean
  kZero,
};

// Booster hyperparameters. Ranges are enforced by validate(); defaults are
// this project's tuned choices for the synthetic benchmark scale.
struct GbdtParams {
  int n_trees = 200;            // >= 0; 0 trains a prior-only model
  double learning_rate = 0.1;   // (0, 1]
  int max_leaves = 31;          // >= 2
  int max_depth = 6;            // >= 1, or 0 for unlimited
  GrowthStrategy growth = GrowthStrategy::kDepthWise;
  int n_bins = 256;             // [2, 256]
  double lambda_l2 = 1.0;       // >= 0, L2 on leaf weights
  double gamma_min_gain = 1e-12;  // >= 0, minimum gain to split
  double min_child_hessian = 1e-3;  // >= 0, per-child hessian floor
  double row_subsample = 1.0;   // (0, 1], rows sampled per tree
  double col_subsample = 1.0;   // (0, 1], features sampled per tree
  std::uint64_t seed = 0;
  BaseScoreMode base_score_mode = BaseScoreMode::kPriorLogodds;

  void validate() const;  // ConfigError on any out-of-range field
};

// Per-feature discretization learned from training data: ascending upper
// bin edges at evenly spaced quantiles. A finite value v falls in the first
// bin whose edge is >= v; values above every edge fall in the last value
// bin; missing values get their own reserved bin past the value bins.
class BinMap {
 public:
  BinMap() = default;
  explicit BinMap(std::vector<std::vector<double>> edges)
      : edges_(std::move(edges)) {}

  static BinMap fit(const FeatureMatrix& matrix, int n_bins);

  int n_features() const { return static_cast<int>(edges_.size()); }
  const std::vector<double>& edges(int feature) const {
    return edges_[static_cast<std::size_t>(feature)];
  }
  // Value bins are 0..n_value_bins-1; the missing bin is one past them.
  int n_value_bins(int feature) const {
    return static_cast<int>(edges_[static_cast<std::size_t>(feature)].size()) +
           1;
  }
  int missing_bin(int feature) const { return n_value_bins(feature); }
  int n_total_bins(int feature) const { return n_value_bins(feature) + 1; }

  int bin_of(int feature, double value) const;

 private:
  std::vector<std::vector<double>> edges_;
};

// Ascending upper edges at evenly spaced quantiles of the finite values,
// deduplicated, never including the maximum (an edge at the maximum would
// separate nothing). At most n_bins - 1 edges; an all-missing or constant
// column gets none.
std::vector<double> quantile_bins(const std::vector<double>& column,
                                  int n_bins);

// First and second derivative of the per-sample logistic loss with respect
// to the logit: g = p - y, h = p (1 - p) with p = sigmoid(pred_logodds).
struct GradHess {
  double g = 0.0;
  double h = 0.0;
};
GradHess logistic_grad_hess(int label, double pred_logodds);

// Per-bin gradient sums for one feature at one node.
struct HistogramBin {
  double sum_g = 0.0;
  double sum_h = 0.0;
  std::int64_t count = 0;
};
using FeatureHistogram = std::vector<HistogramBin>;

// Accumulates the histogram over `rows` (indices into the binned column)
// in the given row order.
FeatureHistogram build_histogram(const std::vector<std::uint16_t>& binned,
                                 int n_total_bins,
                                 const std::vector<std::uint32_t>& rows,
                                 const std::vector<double>& grad,
                                 const std::vector<double>& hess);

// Bin-wise parent - child, the classic sibling shortcut. The grower itself
// always rebuilds from rows; this exists for benchmarking and for checking
// the identity it promises.
FeatureHistogram subtract_histogram(const FeatureHistogram& parent,
                                    const FeatureHistogram& child);

// A chosen split of one feature's histogram. Rows with bin <= threshold go
// left; missing rows follow missing_left.
struct SplitDecision {
  int bin_threshold = -1;
  bool missing_left = true;
  double gain = 0.0;
};

// Scans every threshold and both missing-direction assignments, maximizing
//   gain = 1/2 [ G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l) ],  l = lambda_l2.
// Candidates whose child hessian falls below min_child_hessian are skipped;
// no result unless the best gain reaches gamma_min_gain. Equal gains keep
// the lowest threshold, then missing-left.
std::optional<SplitDecision> best_split(const FeatureHistogram& histogram,
                                        const GbdtParams& params);

// One tree node; nodes live in a flat vector with the root at index 0.
struct TreeNode {
  bool is_leaf = true;
  // Internal-node fields.
  int feature = -1;
  int bin_threshold = -1;
  bool default_left = true;  // where missing values go
  int left = -1;
  int right = -1;
  double gain = 0.0;  // split gain, feeds feature importance
  // Leaf field: log-odds delta, learning rate already applied.
  double weight = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
};

struct GbdtModel {
  GbdtParams params;
  double base_score = 0.0;  // log-odds
  std::vector<std::string> feature_names;
  BinMap bin_map;
  std::vector<Tree> trees;
  // Training log loss: entry 0 is the base-score-only loss, entry t the
  // loss after tree t was added.
  std::vector<double> training_loss;
};

// Boosts params.n_trees rounds of logistic log-loss gradient descent.
// `labels` aligns with matrix rows. Deterministic for fixed params.
GbdtModel train(const FeatureMatrix& matrix, const std::vector<int>& labels,
                const GbdtParams& params);

// Convenience overload joining labels by user id; every matrix row must be
// labeled.
GbdtModel train(const FeatureMatrix& matrix, const LabelSet& labels,
                const GbdtParams& params);

// sigmoid(base_score + sum of tree outputs) per row. Matrix columns must
// match model.feature_names exactly.
std::vector<double> predict(const GbdtModel& model,
                            const FeatureMatrix& matrix);

// Per-feature share of total split gain, descending; empty if the model
// never split.
std::vector<std::pair<std::string, double>> feature_importance(
    const GbdtModel& model);

// Versioned JSON model file; predictions round-trip bit-exactly.
void save_model(const GbdtModel& model, const std::string& path);
GbdtModel load_model(const std::string& path);

}  // namespace churnpipe

#endif  // CHURNPIPE_GBDT_HPP_
