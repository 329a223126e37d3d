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

#include "churnpipe/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>

#include <json.hpp>

#include "churnpipe/error.hpp"
#include "churnpipe/evaluate.hpp"

namespace churnpipe {
namespace {

using json = nlohmann::json;

constexpr const char* kModelFormat = "churnpipe-gbdt";
constexpr int kModelVersion = 1;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

FeatureHistogram build_histogram_span(const std::uint16_t* binned,
                                      int n_total_bins,
                                      const std::uint32_t* rows,
                                      std::size_t n_rows, const double* grad,
                                      const double* hess) {
  FeatureHistogram hist(static_cast<std::size_t>(n_total_bins));
  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::uint32_t r = rows[i];
    HistogramBin& bin = hist[binned[r]];
    bin.sum_g += grad[r];
    bin.sum_h += hess[r];
    ++bin.count;
  }
  return hist;
}

// Grows one tree over pre-binned columns. Row indices are partitioned in
// place as splits are applied, so each node owns a contiguous segment.
class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<std::uint16_t>>& binned,
             const BinMap& bins, const GbdtParams& params,
             const std::vector<double>& grad, const std::vector<double>& hess,
             std::vector<std::uint32_t> rows, std::vector<int> features)
      : binned_(binned),
        bins_(bins),
        params_(params),
        grad_(grad),
        hess_(hess),
        rows_(std::move(rows)),
        features_(std::move(features)) {}

  Tree grow() {
    tree_.nodes.clear();
    const int root = make_leaf(0, rows_.size());
    if (params_.growth == GrowthStrategy::kDepthWise) {
      grow_depth_wise(root);
    } else {
      grow_leaf_wise(root);
    }
    return std::move(tree_);
  }

 private:
  struct Segment {
    std::size_t begin = 0;
    std::size_t end = 0;
    int depth = 0;
  };
  struct NodeSplit {
    int feature = -1;
    SplitDecision decision;
  };

  // Appends a leaf whose weight is the Newton step for its row segment.
  int make_leaf(std::size_t begin, std::size_t end) {
    double sum_g = 0.0;
    double sum_h = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      sum_g += grad_[rows_[i]];
      sum_h += hess_[rows_[i]];
    }
    TreeNode node;
    node.is_leaf = true;
    const double denom = sum_h + params_.lambda_l2;
    node.weight = denom > 0.0 ? -params_.learning_rate * sum_g / denom : 0.0;
    tree_.nodes.push_back(node);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  bool depth_allows_split(int depth) const {
    return params_.max_depth == 0 || depth < params_.max_depth;
  }

  std::optional<NodeSplit> search(const Segment& seg) const {
    if (!depth_allows_split(seg.depth)) return std::nullopt;
    std::optional<NodeSplit> best;
    for (const int f : features_) {
      const FeatureHistogram hist = build_histogram_span(
          binned_[static_cast<std::size_t>(f)].data(), bins_.n_total_bins(f),
          rows_.data() + seg.begin, seg.end - seg.begin, grad_.data(),
          hess_.data());
      const auto decision = best_split(hist, params_);
      // Strict > keeps the lowest feature index on equal gain.
      if (decision && (!best || decision->gain > best->decision.gain)) {
        best = NodeSplit{f, *decision};
      }
    }
    return best;
  }

  // Turns the leaf at node_index into an internal node, partitions its rows,
  // and returns the two child segments.
  std::pair<Segment, Segment> apply(int node_index, const Segment& seg,
                                    const NodeSplit& split) {
    const auto& binned = binned_[static_cast<std::size_t>(split.feature)];
    const std::uint16_t missing_bin =
        static_cast<std::uint16_t>(bins_.missing_bin(split.feature));
    const std::uint16_t threshold =
        static_cast<std::uint16_t>(split.decision.bin_threshold);
    const bool missing_left = split.decision.missing_left;
    // Stable partition keeps rows date-of-insertion ordered inside each
    // child, so histograms accumulate in the same order run after run.
    const auto mid = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(seg.begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(seg.end),
        [&](std::uint32_t r) {
          const std::uint16_t b = binned[r];
          return b == missing_bin ? missing_left : b <= threshold;
        });
    const std::size_t split_at =
        static_cast<std::size_t>(mid - rows_.begin());

    const int left = make_leaf(seg.begin, split_at);
    const int right = make_leaf(split_at, seg.end);

    TreeNode& node = tree_.nodes[static_cast<std::size_t>(node_index)];
    node.is_leaf = false;
    node.feature = split.feature;
    node.bin_threshold = split.decision.bin_threshold;
    node.default_left = split.decision.missing_left;
    node.left = left;
    node.right = right;
    node.gain = split.decision.gain;
    node.weight = 0.0;

    return {Segment{seg.begin, split_at, seg.depth + 1},
            Segment{split_at, seg.end, seg.depth + 1}};
  }

  void grow_depth_wise(int root) {
    std::deque<std::pair<int, Segment>> queue;
    queue.emplace_back(root, Segment{0, rows_.size(), 0});
    int leaves = 1;
    while (!queue.empty()) {
      const auto [node_index, seg] = queue.front();
      queue.pop_front();
      if (leaves >= params_.max_leaves) continue;
      const auto split = search(seg);
      if (!split) continue;
      const auto [left_seg, right_seg] = apply(node_index, seg, *split);
      ++leaves;
      const int left = tree_.nodes[static_cast<std::size_t>(node_index)].left;
      const int right =
          tree_.nodes[static_cast<std::size_t>(node_index)].right;
      queue.emplace_back(left, left_seg);
      queue.emplace_back(right, right_seg);
    }
  }

  void grow_leaf_wise(int root) {
    struct Candidate {
      int node_index;
      Segment seg;
      std::optional<NodeSplit> split;
    };
    std::vector<Candidate> candidates;
    candidates.push_back({root, Segment{0, rows_.size(), 0},
                          search(Segment{0, rows_.size(), 0})});
    int leaves = 1;
    while (leaves < params_.max_leaves) {
      // Highest gain first; equal gains go to the earliest-created leaf.
      int pick = -1;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].split) continue;
        if (pick < 0 || candidates[i].split->decision.gain >
                            candidates[static_cast<std::size_t>(pick)]
                                .split->decision.gain) {
          pick = static_cast<int>(i);
        }
      }
      if (pick < 0) break;
      Candidate chosen = candidates[static_cast<std::size_t>(pick)];
      candidates.erase(candidates.begin() + pick);
      const auto [left_seg, right_seg] =
          apply(chosen.node_index, chosen.seg, *chosen.split);
      ++leaves;
      const TreeNode& node =
          tree_.nodes[static_cast<std::size_t>(chosen.node_index)];
      candidates.push_back({node.left, left_seg, search(left_seg)});
      candidates.push_back({node.right, right_seg, search(right_seg)});
    }
  }

  const std::vector<std::vector<std::uint16_t>>& binned_;
  const BinMap& bins_;
  const GbdtParams& params_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  std::vector<std::uint32_t> rows_;
  std::vector<int> features_;
  Tree tree_;
};

// Routes a pre-binned training row to its leaf weight.
double tree_output_binned(
    const Tree& tree, const BinMap& bins,
    const std::vector<std::vector<std::uint16_t>>& binned, std::size_t row) {
  int node_index = 0;
  while (true) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    if (node.is_leaf) return node.weight;
    const std::uint16_t b =
        binned[static_cast<std::size_t>(node.feature)][row];
    const bool go_left =
        b == static_cast<std::uint16_t>(bins.missing_bin(node.feature))
            ? node.default_left
            : b <= static_cast<std::uint16_t>(node.bin_threshold);
    node_index = go_left ? node.left : node.right;
  }
}

json params_to_json(const GbdtParams& p) {
  return json{
      {"n_trees", p.n_trees},
      {"learning_rate", p.learning_rate},
      {"max_leaves", p.max_leaves},
      {"max_depth", p.max_depth},
      {"growth",
       p.growth == GrowthStrategy::kDepthWise ? "depth_wise" : "leaf_wise"},
      {"n_bins", p.n_bins},
      {"lambda_l2", p.lambda_l2},
      {"gamma_min_gain", p.gamma_min_gain},
      {"min_child_hessian", p.min_child_hessian},
      {"row_subsample", p.row_subsample},
      {"col_subsample", p.col_subsample},
      {"seed", p.seed},
      {"base_score_mode",
       p.base_score_mode == BaseScoreMode::kPriorLogodds ? "prior_logodds"
                                                         : "zero"},
  };
}

GbdtParams params_from_json(const json& j) {
  GbdtParams p;
  p.n_trees = j.at("n_trees").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.max_leaves = j.at("max_leaves").get<int>();
  p.max_depth = j.at("max_depth").get<int>();
  p.growth = j.at("growth").get<std::string>() == "leaf_wise"
                 ? GrowthStrategy::kLeafWise
                 : GrowthStrategy::kDepthWise;
  p.n_bins = j.at("n_bins").get<int>();
  p.lambda_l2 = j.at("lambda_l2").get<double>();
  p.gamma_min_gain = j.at("gamma_min_gain").get<double>();
  p.min_child_hessian = j.at("min_child_hessian").get<double>();
  p.row_subsample = j.at("row_subsample").get<double>();
  p.col_subsample = j.at("col_subsample").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.base_score_mode =
      j.at("base_score_mode").get<std::string>() == "zero"
          ? BaseScoreMode::kZero
          : BaseScoreMode::kPriorLogodds;
  return p;
}

}  // namespace

void GbdtParams::validate() const {
  if (n_trees < 0) throw ConfigError("gbdt: n_trees must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("gbdt: learning_rate must be in (0, 1]");
  }
  if (max_leaves < 2) throw ConfigError("gbdt: max_leaves must be >= 2");
  if (max_depth < 0) {
    throw ConfigError("gbdt: max_depth must be >= 1, or 0 for unlimited");
  }
  if (n_bins < 2 || n_bins > 256) {
    throw ConfigError("gbdt: n_bins must be in [2, 256]");
  }
  if (lambda_l2 < 0.0) throw ConfigError("gbdt: lambda_l2 must be >= 0");
  if (gamma_min_gain < 0.0) {
    throw ConfigError("gbdt: gamma_min_gain must be >= 0");
  }
  if (min_child_hessian < 0.0) {
    throw ConfigError("gbdt: min_child_hessian must be >= 0");
  }
  if (!(row_subsample > 0.0 && row_subsample <= 1.0)) {
    throw ConfigError("gbdt: row_subsample must be in (0, 1]");
  }
  if (!(col_subsample > 0.0 && col_subsample <= 1.0)) {
    throw ConfigError("gbdt: col_subsample must be in (0, 1]");
  }
}

std::vector<double> quantile_bins(const std::vector<double>& column,
                                  int n_bins) {
  if (n_bins < 2) throw ConfigError("quantile_bins: n_bins must be >= 2");
  std::vector<double> finite;
  finite.reserve(column.size());
  for (const double v : column) {
    if (!is_missing(v)) finite.push_back(v);
  }
  if (finite.empty()) return {};
  std::sort(finite.begin(), finite.end());
  const double max_value = finite.back();
  const std::size_t n = finite.size();

  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(n_bins) - 1);
  for (int k = 1; k < n_bins; ++k) {
    const std::size_t idx =
        static_cast<std::size_t>(static_cast<double>(k) *
                                 static_cast<double>(n - 1) /
                                 static_cast<double>(n_bins));
    const double edge = finite[idx];
    // Edges must ascend strictly, and an edge at the maximum would leave
    // the top bin empty.
    if (edge >= max_value) break;
    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
  }
  return edges;
}

BinMap BinMap::fit(const FeatureMatrix& matrix, int n_bins) {
  std::vector<std::vector<double>> edges;
  edges.reserve(matrix.cols());
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    edges.push_back(quantile_bins(matrix.column(c), n_bins));
  }
  return BinMap(std::move(edges));
}

int BinMap::bin_of(int feature, double value) const {
  if (is_missing(value)) return missing_bin(feature);
  const auto& e = edges_[static_cast<std::size_t>(feature)];
  // First edge >= value; bin i covers (edges[i-1], edges[i]].
  return static_cast<int>(std::lower_bound(e.begin(), e.end(), value) -
                          e.begin());
}

GradHess logistic_grad_hess(int label, double pred_logodds) {
  const double p = sigmoid(pred_logodds);
  return {p - static_cast<double>(label), p * (1.0 - p)};
}

FeatureHistogram build_histogram(const std::vector<std::uint16_t>& binned,
                                 int n_total_bins,
                                 const std::vector<std::uint32_t>& rows,
                                 const std::vector<double>& grad,
                                 const std::vector<double>& hess) {
  return build_histogram_span(binned.data(), n_total_bins, rows.data(),
                              rows.size(), grad.data(), hess.data());
}

FeatureHistogram subtract_histogram(const FeatureHistogram& parent,
                                    const FeatureHistogram& child) {
  if (parent.size() != child.size()) {
    throw DataError("subtract_histogram: bin counts differ");
  }
  FeatureHistogram out(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) {
    out[i].sum_g = parent[i].sum_g - child[i].sum_g;
    out[i].sum_h = parent[i].sum_h - child[i].sum_h;
    out[i].count = parent[i].count - child[i].count;
  }
  return out;
}

std::optional<SplitDecision> best_split(const FeatureHistogram& histogram,
                                        const GbdtParams& params) {
  // The last bin is the missing bin; value bins precede it.
  if (histogram.size() < 2) return std::nullopt;
  const int n_value_bins = static_cast<int>(histogram.size()) - 1;
  const HistogramBin& missing = histogram.back();

  double total_g = 0.0;
  double total_h = 0.0;
  for (const auto& bin : histogram) {
    total_g += bin.sum_g;
    total_h += bin.sum_h;
  }
  const double lambda = params.lambda_l2;
  const double parent_term =
      total_h + lambda > 0.0 ? total_g * total_g / (total_h + lambda) : 0.0;

  std::optional<SplitDecision> best;
  double best_gain = -std::numeric_limits<double>::infinity();

  double prefix_g = 0.0;
  double prefix_h = 0.0;
  // Threshold t sends bins 0..t left; the top value bin must stay right.
  for (int t = 0; t + 1 < n_value_bins; ++t) {
    prefix_g += histogram[static_cast<std::size_t>(t)].sum_g;
    prefix_h += histogram[static_cast<std::size_t>(t)].sum_h;
    for (const bool missing_left : {true, false}) {
      const double gl = missing_left ? prefix_g + missing.sum_g : prefix_g;
      const double hl = missing_left ? prefix_h + missing.sum_h : prefix_h;
      const double gr = total_g - gl;
      const double hr = total_h - hl;
      if (hl < params.min_child_hessian || hr < params.min_child_hessian) {
        continue;
      }
      if (hl + lambda <= 0.0 || hr + lambda <= 0.0) continue;
      const double gain =
          0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                 parent_term);
      // Strict > resolves ties toward the lowest threshold, then toward
      // sending missing left (the order of this inner loop).
      if (gain > best_gain) {
        best_gain = gain;
        best = SplitDecision{t, missing_left, gain};
      }
    }
  }

  if (!best || best->gain < params.gamma_min_gain) return std::nullopt;
  return best;
}

GbdtModel train(const FeatureMatrix& matrix, const std::vector<int>& labels,
                const GbdtParams& params) {
  params.validate();
  const std::size_t n_rows = matrix.rows();
  if (n_rows == 0) throw DataError("gbdt: cannot train on an empty matrix");
  if (labels.size() != n_rows) {
    throw DataError("gbdt: " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(n_rows) + " rows");
  }
  std::size_t positives = 0;
  for (const int y : labels) {
    if (y != 0 && y != 1) throw DataError("gbdt: labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }

  GbdtModel model;
  model.params = params;
  model.feature_names = matrix.feature_names();
  if (params.base_score_mode == BaseScoreMode::kPriorLogodds) {
    if (positives == 0 || positives == n_rows) {
      throw DataError(
          "gbdt: single-class labels cannot seed a prior log-odds base "
          "score; use base_score_mode=zero");
    }
    const double prior =
        static_cast<double>(positives) / static_cast<double>(n_rows);
    model.base_score = std::log(prior / (1.0 - prior));
  } else {
    model.base_score = 0.0;
  }

  model.bin_map = BinMap::fit(matrix, params.n_bins);
  const int n_features = static_cast<int>(matrix.cols());
  std::vector<std::vector<std::uint16_t>> binned(
      static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f) {
    auto& column = binned[static_cast<std::size_t>(f)];
    column.resize(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
      column[r] = static_cast<std::uint16_t>(
          model.bin_map.bin_of(f, matrix.at(r, static_cast<std::size_t>(f))));
    }
  }

  std::vector<double> scores(n_rows, model.base_score);
  std::vector<double> grad(n_rows);
  std::vector<double> hess(n_rows);
  std::vector<double> probs(n_rows);

  auto record_loss = [&] {
    for (std::size_t r = 0; r < n_rows; ++r) probs[r] = sigmoid(scores[r]);
    model.training_loss.push_back(log_loss(labels, probs));
  };
  record_loss();

  for (int round = 0; round < params.n_trees; ++round) {
    for (std::size_t r = 0; r < n_rows; ++r) {
      const GradHess gh = logistic_grad_hess(labels[r], scores[r]);
      grad[r] = gh.g;
      hess[r] = gh.h;
    }

    // Per-round subsampling; both default off. The partial Fisher-Yates
    // plus sort keeps selection deterministic and row order canonical.
    std::mt19937_64 rng(splitmix64(
        params.seed + 0x9E3779B97F4A7C15ULL *
                          (static_cast<std::uint64_t>(round) + 1)));
    std::vector<std::uint32_t> rows(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
      rows[r] = static_cast<std::uint32_t>(r);
    }
    if (params.row_subsample < 1.0) {
      const std::size_t keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 params.row_subsample * static_cast<double>(n_rows)));
      for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + rng() % (n_rows - i);
        std::swap(rows[i], rows[j]);
      }
      rows.resize(keep);
      std::sort(rows.begin(), rows.end());
    }
    std::vector<int> features(static_cast<std::size_t>(n_features));
    for (int f = 0; f < n_features; ++f) {
      features[static_cast<std::size_t>(f)] = f;
    }
    if (params.col_subsample < 1.0 && n_features > 0) {
      const std::size_t keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(params.col_subsample *
                                      static_cast<double>(n_features)));
      for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j =
            i + rng() % (static_cast<std::size_t>(n_features) - i);
        std::swap(features[i], features[j]);
      }
      features.resize(keep);
      std::sort(features.begin(), features.end());
    }

    TreeGrower grower(binned, model.bin_map, params, grad, hess,
                      std::move(rows), std::move(features));
    Tree tree = grower.grow();
    for (std::size_t r = 0; r < n_rows; ++r) {
      scores[r] += tree_output_binned(tree, model.bin_map, binned, r);
    }
    model.trees.push_back(std::move(tree));
    record_loss();
  }

  return model;
}

GbdtModel train(const FeatureMatrix& matrix, const LabelSet& labels,
                const GbdtParams& params) {
  std::vector<int> y;
  y.reserve(matrix.rows());
  for (const auto& user : matrix.user_ids()) {
    const auto it = labels.labels.find(user);
    if (it == labels.labels.end()) {
      throw DataError("gbdt: no label for user '" + user + "'");
    }
    y.push_back(it->second);
  }
  return train(matrix, y, params);
}

std::vector<double> predict(const GbdtModel& model,
                            const FeatureMatrix& matrix) {
  if (matrix.feature_names() != model.feature_names) {
    throw DataError(
        "gbdt: matrix columns do not match the model's feature names");
  }
  std::vector<double> preds(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    double score = model.base_score;
    const double* row = matrix.row_data(r);
    for (const Tree& tree : model.trees) {
      int node_index = 0;
      while (true) {
        const TreeNode& node =
            tree.nodes[static_cast<std::size_t>(node_index)];
        if (node.is_leaf) {
          score += node.weight;
          break;
        }
        const double v = row[node.feature];
        const bool go_left =
            is_missing(v)
                ? node.default_left
                : model.bin_map.bin_of(node.feature, v) <= node.bin_threshold;
        node_index = go_left ? node.left : node.right;
      }
    }
    preds[r] = sigmoid(score);
  }
  return preds;
}

std::vector<std::pair<std::string, double>> feature_importance(
    const GbdtModel& model) {
  std::vector<double> gain(model.feature_names.size(), 0.0);
  double total = 0.0;
  for (const Tree& tree : model.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf) continue;
      gain[static_cast<std::size_t>(node.feature)] += node.gain;
      total += node.gain;
    }
  }
  if (total <= 0.0) return {};
  std::vector<std::pair<std::string, double>> shares;
  for (std::size_t f = 0; f < gain.size(); ++f) {
    if (gain[f] > 0.0) {
      shares.emplace_back(model.feature_names[f], gain[f] / total);
    }
  }
  // Descending by share; stable keeps feature order on exact ties.
  std::stable_sort(shares.begin(), shares.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  return shares;
}

void save_model(const GbdtModel& model, const std::string& path) {
  json trees = json::array();
  for (const Tree& tree : model.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      nodes.push_back(json{
          {"leaf", node.is_leaf},
          {"feature", node.feature},
          {"bin", node.bin_threshold},
          {"default_left", node.default_left},
          {"left", node.left},
          {"right", node.right},
          {"gain", node.gain},
          {"weight", node.weight},
      });
    }
    trees.push_back(std::move(nodes));
  }
  json edges = json::array();
  for (int f = 0; f < model.bin_map.n_features(); ++f) {
    edges.push_back(model.bin_map.edges(f));
  }
  const json doc{
      {"format", kModelFormat},
      {"version", kModelVersion},
      {"params", params_to_json(model.params)},
      {"base_score", model.base_score},
      {"feature_names", model.feature_names},
      {"bin_edges", std::move(edges)},
      {"trees", std::move(trees)},
      {"training_loss", model.training_loss},
  };
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("failed writing model file: " + path);
}

GbdtModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) {
      throw DataError("not a churnpipe model file: " + path);
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw DataError("unsupported model version in " + path);
    }
    GbdtModel model;
    model.params = params_from_json(doc.at("params"));
    model.base_score = doc.at("base_score").get<double>();
    model.feature_names =
        doc.at("feature_names").get<std::vector<std::string>>();
    model.bin_map = BinMap(
        doc.at("bin_edges").get<std::vector<std::vector<double>>>());
    for (const auto& tree_json : doc.at("trees")) {
      Tree tree;
      for (const auto& n : tree_json) {
        TreeNode node;
        node.is_leaf = n.at("leaf").get<bool>();
        node.feature = n.at("feature").get<int>();
        node.bin_threshold = n.at("bin").get<int>();
        node.default_left = n.at("default_left").get<bool>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.gain = n.at("gain").get<double>();
        node.weight = n.at("weight").get<double>();
        tree.nodes.push_back(node);
      }
      model.trees.push_back(std::move(tree));
    }
    model.training_loss =
        doc.at("training_loss").get<std::vector<double>>();
    return model;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
}

}  // namespace churnpipe
