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
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "churnpipe/error.hpp"
#include "churnpipe/evaluate.hpp"
#include "churnpipe/feature_matrix.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace {

using churnpipe::best_split;
using churnpipe::BinMap;
using churnpipe::build_histogram;
using churnpipe::ConfigError;
using churnpipe::DataError;
using churnpipe::FeatureHistogram;
using churnpipe::FeatureMatrix;
using churnpipe::GbdtModel;
using churnpipe::GbdtParams;
using churnpipe::GradHess;
using churnpipe::GrowthStrategy;
using churnpipe::HistogramBin;
using churnpipe::load_model;
using churnpipe::logistic_grad_hess;
using churnpipe::quantile_bins;
using churnpipe::save_model;
using churnpipe::SplitDecision;
using churnpipe::subtract_histogram;
using churnpipe::Tree;
using churnpipe::TreeNode;
using churnpipe::testing::slurp;
using churnpipe::testing::TempDir;

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Per-sample logistic loss as a plain function of the logit, used to check
// the analytic gradient and hessian against finite differences.
double logistic_loss(int label, double logit) {
  const double p = 1.0 / (1.0 + std::exp(-logit));
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

// A learnable binary problem: two informative columns plus one pure-noise
// column, with labels drawn from a logistic model over the informative
// part. Missing values are sprinkled into the first column.
struct Problem {
  FeatureMatrix matrix{{}, {}};
  std::vector<int> labels;
};

Problem make_problem(std::size_t n_rows, std::uint64_t seed,
                     double missing_rate = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<churnpipe::UserId> ids(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    ids[r] = "user_" + std::to_string(r);
  }
  Problem problem;
  problem.matrix = FeatureMatrix(ids, {"signal_a", "signal_b", "noise"});
  problem.labels.resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const double a = unit(rng);
    const double b = unit(rng);
    const double z = 4.0 * (a - 0.5) + 2.0 * (b - 0.5);
    const double p = 1.0 / (1.0 + std::exp(-z));
    problem.labels[r] = unit(rng) < p ? 1 : 0;
    if (missing_rate > 0.0 && unit(rng) < missing_rate) {
      problem.matrix.set(r, 0, kMissing);
    } else {
      problem.matrix.set(r, 0, a);
    }
    problem.matrix.set(r, 1, b);
    problem.matrix.set(r, 2, unit(rng));
  }
  return problem;
}

int count_leaves(const Tree& tree) {
  int leaves = 0;
  for (const TreeNode& node : tree.nodes) {
    if (node.is_leaf) ++leaves;
  }
  return leaves;
}

int node_depth(const Tree& tree, int index) {
  int depth = 0;
  std::vector<int> stack{0};
  std::vector<int> depths{0};
  while (!stack.empty()) {
    const int current = stack.back();
    const int d = depths.back();
    stack.pop_back();
    depths.pop_back();
    if (current == index) return d;
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(current)];
    if (!node.is_leaf) {
      stack.push_back(node.left);
      depths.push_back(d + 1);
      stack.push_back(node.right);
      depths.push_back(d + 1);
    }
  }
  return depth;
}

int max_leaf_depth(const Tree& tree) {
  int deepest = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].is_leaf) {
      deepest = std::max(deepest, node_depth(tree, static_cast<int>(i)));
    }
  }
  return deepest;
}

// Re-derives the best split straight from the documented contract: scan
// thresholds in ascending order, try missing-left before missing-right,
// keep strictly better gains only, and require both children to clear the
// hessian floor and the final gain to reach gamma.
std::optional<SplitDecision> oracle_best_split(
    const FeatureHistogram& histogram, const GbdtParams& params) {
  if (histogram.size() < 2) return std::nullopt;
  const int n_value_bins = static_cast<int>(histogram.size()) - 1;
  double total_g = 0.0;
  double total_h = 0.0;
  for (const HistogramBin& bin : histogram) {
    total_g += bin.sum_g;
    total_h += bin.sum_h;
  }
  const double lambda = params.lambda_l2;
  const double parent_term =
      total_h + lambda > 0.0 ? total_g * total_g / (total_h + lambda) : 0.0;

  std::optional<SplitDecision> best;
  for (int t = 0; t + 1 < n_value_bins; ++t) {
    double left_g = 0.0;
    double left_h = 0.0;
    for (int b = 0; b <= t; ++b) {
      left_g += histogram[static_cast<std::size_t>(b)].sum_g;
      left_h += histogram[static_cast<std::size_t>(b)].sum_h;
    }
    for (const bool missing_left : {true, false}) {
      const double gl =
          missing_left ? left_g + histogram.back().sum_g : left_g;
      const double hl =
          missing_left ? left_h + histogram.back().sum_h : left_h;
      const double gr = total_g - gl;
      const double hr = total_h - hl;
      if (hl < params.min_child_hessian || hr < params.min_child_hessian) {
        continue;
      }
      if (hl + lambda <= 0.0 || hr + lambda <= 0.0) continue;
      const double gain =
          0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                 parent_term);
      if (!best || gain > best->gain) {
        best = SplitDecision{t, missing_left, gain};
      }
    }
  }
  if (!best || best->gain < params.gamma_min_gain) return std::nullopt;
  return best;
}

}  // namespace

TEST_SUITE("gbdt") {

TEST_CASE("default params validate; each out-of-range field is rejected") {
  GbdtParams params;
  CHECK_NOTHROW(params.validate());

  auto expect_reject = [](GbdtParams bad) {
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  };
  GbdtParams p;

  p = GbdtParams{};
  p.n_trees = -1;
  expect_reject(p);
  p = GbdtParams{};
  p.learning_rate = 0.0;
  expect_reject(p);
  p = GbdtParams{};
  p.learning_rate = 1.5;
  expect_reject(p);
  p = GbdtParams{};
  p.max_leaves = 1;
  expect_reject(p);
  p = GbdtParams{};
  p.max_depth = -1;
  expect_reject(p);
  p = GbdtParams{};
  p.n_bins = 1;
  expect_reject(p);
  p = GbdtParams{};
  p.n_bins = 257;
  expect_reject(p);
  p = GbdtParams{};
  p.lambda_l2 = -1.0;
  expect_reject(p);
  p = GbdtParams{};
  p.gamma_min_gain = -1e-9;
  expect_reject(p);
  p = GbdtParams{};
  p.min_child_hessian = -1.0;
  expect_reject(p);
  p = GbdtParams{};
  p.row_subsample = 0.0;
  expect_reject(p);
  p = GbdtParams{};
  p.row_subsample = 1.5;
  expect_reject(p);
  p = GbdtParams{};
  p.col_subsample = 0.0;
  expect_reject(p);

  // Boundary values that must pass.
  p = GbdtParams{};
  p.n_trees = 0;
  p.learning_rate = 1.0;
  p.max_leaves = 2;
  p.max_depth = 0;  // unlimited
  p.n_bins = 2;
  p.lambda_l2 = 0.0;
  p.gamma_min_gain = 0.0;
  p.min_child_hessian = 0.0;
  p.row_subsample = 1.0;
  p.col_subsample = 1.0;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("quantile bins: quartile edges of 1..100") {
  std::vector<double> column(100);
  for (int i = 0; i < 100; ++i) column[static_cast<std::size_t>(i)] = i + 1;
  // Shuffle to prove the input need not be sorted.
  std::mt19937_64 rng(7);
  std::shuffle(column.begin(), column.end(), rng);

  const std::vector<double> edges = quantile_bins(column, 4);
  REQUIRE(edges.size() == 3);
  CHECK(edges[0] == 25.0);
  CHECK(edges[1] == 50.0);
  CHECK(edges[2] == 75.0);
}

TEST_CASE("quantile bins: heavy ties deduplicate") {
  // Six distinct requests over three distinct values can produce at most
  // two edges (an edge at the maximum would separate nothing).
  const std::vector<double> column{1.0, 1.0, 2.0, 2.0, 3.0, 3.0};
  const std::vector<double> edges = quantile_bins(column, 6);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == 1.0);
  CHECK(edges[1] == 2.0);
}

TEST_CASE("quantile bins: degenerate columns get no edges") {
  CHECK(quantile_bins({}, 8).empty());
  CHECK(quantile_bins({kMissing, kMissing}, 8).empty());
  CHECK(quantile_bins({5.0, 5.0, 5.0}, 8).empty());
  CHECK_THROWS_AS(quantile_bins({1.0, 2.0}, 1), ConfigError);
}

TEST_CASE("quantile bins: random columns obey the edge contract") {
  std::mt19937_64 rng(20260818);
  std::uniform_int_distribution<int> size_dist(1, 400);
  std::uniform_int_distribution<int> bins_dist(2, 64);
  std::uniform_int_distribution<int> value_dist(0, 30);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < 50; ++trial) {
    const int n = size_dist(rng);
    const int n_bins = bins_dist(rng);
    std::vector<double> column;
    double max_finite = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (unit(rng) < 0.15) {
        column.push_back(kMissing);
      } else {
        const double v = static_cast<double>(value_dist(rng));
        column.push_back(v);
        max_finite = std::max(max_finite, v);
      }
    }
    const std::vector<double> edges = quantile_bins(column, n_bins);
    CHECK(edges.size() <= static_cast<std::size_t>(n_bins - 1));
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      CHECK(edges[i] < edges[i + 1]);
    }
    for (const double e : edges) {
      CHECK(e < max_finite);  // never at or above the maximum
    }
  }
}

TEST_CASE("bin_of: inclusive upper edges and the reserved missing bin") {
  const BinMap bins(std::vector<std::vector<double>>{{10.0, 20.0}});
  REQUIRE(bins.n_features() == 1);
  CHECK(bins.n_value_bins(0) == 3);
  CHECK(bins.missing_bin(0) == 3);
  CHECK(bins.n_total_bins(0) == 4);

  // Bin i covers (edges[i-1], edges[i]]; the top bin is open above.
  CHECK(bins.bin_of(0, -100.0) == 0);
  CHECK(bins.bin_of(0, 10.0) == 0);
  CHECK(bins.bin_of(0, 10.5) == 1);
  CHECK(bins.bin_of(0, 20.0) == 1);
  CHECK(bins.bin_of(0, 20.0000001) == 2);
  CHECK(bins.bin_of(0, 1e9) == 2);
  CHECK(bins.bin_of(0, kMissing) == 3);
}

TEST_CASE("bin_of: index equals the count of edges strictly below") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value_dist(-50.0, 50.0);
  const std::vector<double> edges{-20.0, -3.5, 0.0, 7.25, 31.0};
  const BinMap bins(std::vector<std::vector<double>>{edges});
  for (int trial = 0; trial < 500; ++trial) {
    const double v = value_dist(rng);
    int below = 0;
    for (const double e : edges) {
      if (e < v) ++below;
    }
    CHECK(bins.bin_of(0, v) == below);
  }
}

TEST_CASE("logistic gradient and hessian match hand values") {
  const GradHess gh = logistic_grad_hess(1, 0.0);
  CHECK(gh.g == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(gh.h == doctest::Approx(0.25).epsilon(1e-15));
  const GradHess gh0 = logistic_grad_hess(0, 0.0);
  CHECK(gh0.g == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gh0.h == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("logistic gradient and hessian match central finite differences") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> logit_dist(-6.0, 6.0);
  const double eps = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const int label = static_cast<int>(rng() % 2);
    const double x = logit_dist(rng);
    const GradHess gh = logistic_grad_hess(label, x);
    const double l_plus = logistic_loss(label, x + eps);
    const double l_minus = logistic_loss(label, x - eps);
    const double l_mid = logistic_loss(label, x);
    const double fd_grad = (l_plus - l_minus) / (2.0 * eps);
    const double fd_hess = (l_plus - 2.0 * l_mid + l_minus) / (eps * eps);
    CHECK(gh.g == doctest::Approx(fd_grad).epsilon(1e-6));
    CHECK(gh.h == doctest::Approx(fd_hess).epsilon(1e-5));
    CHECK(gh.h > 0.0);
  }
}

TEST_CASE("build_histogram matches a direct per-bin accumulation") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> gh_dist(-2.0, 2.0);
  const int n_total_bins = 6;
  const std::size_t n_rows = 200;

  std::vector<std::uint16_t> binned(n_rows);
  std::vector<double> grad(n_rows);
  std::vector<double> hess(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    binned[r] = static_cast<std::uint16_t>(rng() % n_total_bins);
    grad[r] = gh_dist(rng);
    hess[r] = std::abs(gh_dist(rng));
  }
  // A scrambled strict subset of the rows.
  std::vector<std::uint32_t> rows;
  for (std::uint32_t r = 0; r < n_rows; ++r) {
    if (rng() % 3 != 0) rows.push_back(r);
  }
  std::shuffle(rows.begin(), rows.end(), rng);

  const FeatureHistogram hist =
      build_histogram(binned, n_total_bins, rows, grad, hess);
  REQUIRE(hist.size() == static_cast<std::size_t>(n_total_bins));

  for (int b = 0; b < n_total_bins; ++b) {
    double sum_g = 0.0;
    double sum_h = 0.0;
    std::int64_t count = 0;
    for (const std::uint32_t r : rows) {
      if (binned[r] == b) {
        sum_g += grad[r];
        sum_h += hess[r];
        ++count;
      }
    }
    // Accumulation order differs, so allow rounding slack on the sums.
    CHECK(hist[static_cast<std::size_t>(b)].sum_g ==
          doctest::Approx(sum_g).epsilon(1e-12));
    CHECK(hist[static_cast<std::size_t>(b)].sum_h ==
          doctest::Approx(sum_h).epsilon(1e-12));
    CHECK(hist[static_cast<std::size_t>(b)].count == count);
  }
}

TEST_CASE("subtract_histogram reproduces the sibling within 1e-9") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> gh_dist(-3.0, 3.0);
  const int n_total_bins = 17;
  const std::size_t n_rows = 500;

  std::vector<std::uint16_t> binned(n_rows);
  std::vector<double> grad(n_rows);
  std::vector<double> hess(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    binned[r] = static_cast<std::uint16_t>(rng() % n_total_bins);
    grad[r] = gh_dist(rng);
    hess[r] = std::abs(gh_dist(rng));
  }
  std::vector<std::uint32_t> all_rows(n_rows);
  std::vector<std::uint32_t> left_rows;
  std::vector<std::uint32_t> right_rows;
  for (std::uint32_t r = 0; r < n_rows; ++r) {
    all_rows[r] = r;
    if (rng() % 2 == 0) {
      left_rows.push_back(r);
    } else {
      right_rows.push_back(r);
    }
  }

  const FeatureHistogram parent =
      build_histogram(binned, n_total_bins, all_rows, grad, hess);
  const FeatureHistogram left =
      build_histogram(binned, n_total_bins, left_rows, grad, hess);
  const FeatureHistogram right_direct =
      build_histogram(binned, n_total_bins, right_rows, grad, hess);
  const FeatureHistogram right_shortcut = subtract_histogram(parent, left);

  REQUIRE(right_shortcut.size() == right_direct.size());
  for (std::size_t b = 0; b < right_direct.size(); ++b) {
    CHECK(std::abs(right_shortcut[b].sum_g - right_direct[b].sum_g) < 1e-9);
    CHECK(std::abs(right_shortcut[b].sum_h - right_direct[b].sum_h) < 1e-9);
    CHECK(right_shortcut[b].count == right_direct[b].count);
  }

  const FeatureHistogram skinny(3);
  CHECK_THROWS_AS(subtract_histogram(parent, skinny), DataError);
}

TEST_CASE("best_split: hand-computed two-bin gain") {
  // Left bin holds all-negative gradient, right bin all-positive; missing
  // bin is empty, so both missing directions tie and missing-left wins.
  FeatureHistogram hist(3);
  hist[0] = HistogramBin{-2.0, 1.0, 2};
  hist[1] = HistogramBin{3.0, 2.0, 3};
  hist[2] = HistogramBin{0.0, 0.0, 0};

  GbdtParams params;
  params.lambda_l2 = 1.0;
  params.min_child_hessian = 0.0;
  params.gamma_min_gain = 0.0;

  const auto split = best_split(hist, params);
  REQUIRE(split.has_value());
  CHECK(split->bin_threshold == 0);
  CHECK(split->missing_left);
  // gain = 1/2 [ (-2)^2/(1+1) + 3^2/(2+1) - 1^2/(3+1) ] = 2.375
  CHECK(split->gain == doctest::Approx(2.375).epsilon(1e-12));
}

TEST_CASE("best_split: hessian floor and gamma threshold suppress splits") {
  FeatureHistogram hist(3);
  hist[0] = HistogramBin{-2.0, 1.0, 2};
  hist[1] = HistogramBin{3.0, 2.0, 3};
  hist[2] = HistogramBin{0.0, 0.0, 0};

  GbdtParams params;
  params.lambda_l2 = 1.0;
  params.gamma_min_gain = 0.0;
  params.min_child_hessian = 1.5;  // left child's hessian is only 1.0
  CHECK_FALSE(best_split(hist, params).has_value());

  params.min_child_hessian = 0.0;
  params.gamma_min_gain = 2.376;  // just above the attainable 2.375
  CHECK_FALSE(best_split(hist, params).has_value());

  params.gamma_min_gain = 2.374;
  CHECK(best_split(hist, params).has_value());
}

TEST_CASE("best_split: single value bin cannot split") {
  FeatureHistogram hist(2);  // one value bin plus the missing bin
  hist[0] = HistogramBin{-5.0, 3.0, 4};
  hist[1] = HistogramBin{2.0, 1.0, 1};
  GbdtParams params;
  params.min_child_hessian = 0.0;
  params.gamma_min_gain = 0.0;
  CHECK_FALSE(best_split(hist, params).has_value());
}

TEST_CASE("best_split matches an exhaustive oracle on random histograms") {
  std::mt19937_64 rng(271828);
  std::uniform_int_distribution<int> bins_dist(2, 12);
  std::uniform_real_distribution<double> g_dist(-4.0, 4.0);
  std::uniform_real_distribution<double> h_dist(0.0, 3.0);
  std::uniform_real_distribution<double> lambda_dist(0.0, 2.0);
  std::uniform_real_distribution<double> floor_dist(0.0, 1.0);

  for (int trial = 0; trial < 300; ++trial) {
    const int n_value_bins = bins_dist(rng);
    FeatureHistogram hist(static_cast<std::size_t>(n_value_bins) + 1);
    for (auto& bin : hist) {
      // Occasional empty bins exercise the skip paths.
      if (rng() % 5 == 0) continue;
      bin.sum_g = g_dist(rng);
      bin.sum_h = h_dist(rng);
      bin.count = static_cast<std::int64_t>(rng() % 20);
    }
    GbdtParams params;
    params.lambda_l2 = lambda_dist(rng);
    params.min_child_hessian = floor_dist(rng);
    params.gamma_min_gain = (rng() % 2 == 0) ? 0.0 : 0.25;

    const auto got = best_split(hist, params);
    const auto want = oracle_best_split(hist, params);
    REQUIRE(got.has_value() == want.has_value());
    if (got.has_value()) {
      CHECK(got->bin_threshold == want->bin_threshold);
      CHECK(got->missing_left == want->missing_left);
      CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-12));
    }
  }
}

TEST_CASE("training loss never increases and ends below the prior") {
  const Problem problem = make_problem(600, 11);
  GbdtParams params;
  params.n_trees = 40;
  params.learning_rate = 0.3;
  params.max_leaves = 15;
  params.seed = 1;

  const GbdtModel model = train(problem.matrix, problem.labels, params);
  REQUIRE(model.training_loss.size() ==
          static_cast<std::size_t>(params.n_trees) + 1);
  for (std::size_t t = 1; t < model.training_loss.size(); ++t) {
    CHECK(model.training_loss[t] <= model.training_loss[t - 1] + 1e-12);
  }
  CHECK(model.training_loss.back() < 0.8 * model.training_loss.front());
}

TEST_CASE("base score equals the prior log-odds of the training labels") {
  const Problem problem = make_problem(400, 23);
  GbdtParams params;
  params.n_trees = 0;

  const GbdtModel model = train(problem.matrix, problem.labels, params);
  double mean = 0.0;
  for (const int y : problem.labels) mean += y;
  mean /= static_cast<double>(problem.labels.size());
  CHECK(model.base_score ==
        doctest::Approx(std::log(mean / (1.0 - mean))).epsilon(1e-12));

  // A prior-only model predicts the training mean for every row.
  const std::vector<double> preds = predict(model, problem.matrix);
  for (const double p : preds) {
    CHECK(p == doctest::Approx(mean).epsilon(1e-12));
  }
  REQUIRE(model.training_loss.size() == 1);
}

TEST_CASE("leaf and depth caps hold under both growth strategies") {
  const Problem problem = make_problem(500, 37);
  for (const GrowthStrategy growth :
       {GrowthStrategy::kDepthWise, GrowthStrategy::kLeafWise}) {
    GbdtParams params;
    params.n_trees = 10;
    params.max_leaves = 4;
    params.max_depth = 2;
    params.growth = growth;
    const GbdtModel model = train(problem.matrix, problem.labels, params);
    REQUIRE(model.trees.size() == 10);
    for (const Tree& tree : model.trees) {
      CHECK(count_leaves(tree) <= 4);
      CHECK(max_leaf_depth(tree) <= 2);
    }
  }
}

TEST_CASE("leaf-wise growth respects the leaf cap with unlimited depth") {
  // Sanity check that the two strategies actually behave differently:
  // leaf-wise with unlimited depth may grow lopsided trees.
  const Problem problem = make_problem(500, 41);
  GbdtParams params;
  params.n_trees = 5;
  params.max_leaves = 8;
  params.max_depth = 0;  // unlimited
  params.growth = GrowthStrategy::kLeafWise;
  const GbdtModel model = train(problem.matrix, problem.labels, params);
  for (const Tree& tree : model.trees) {
    CHECK(count_leaves(tree) <= 8);
  }
}

TEST_CASE("prediction routes missing values by default_left") {
  // A hand-built one-split model: x <= 10 goes left (weight -1.0), else
  // right (+1.0). Flipping default_left must flip only the missing row.
  GbdtModel model;
  model.base_score = 0.0;
  model.feature_names = {"x"};
  model.bin_map = BinMap(std::vector<std::vector<double>>{{10.0}});

  Tree tree;
  TreeNode root;
  root.is_leaf = false;
  root.feature = 0;
  root.bin_threshold = 0;
  root.default_left = true;
  root.left = 1;
  root.right = 2;
  root.gain = 1.0;
  TreeNode left;
  left.is_leaf = true;
  left.weight = -1.0;
  TreeNode right;
  right.is_leaf = true;
  right.weight = 1.0;
  tree.nodes = {root, left, right};
  model.trees = {tree};

  FeatureMatrix matrix({"low", "high", "unknown"}, {"x"});
  matrix.set(0, 0, 5.0);
  matrix.set(1, 0, 20.0);
  matrix.set(2, 0, kMissing);

  const double p_left = 1.0 / (1.0 + std::exp(1.0));
  const double p_right = 1.0 / (1.0 + std::exp(-1.0));

  std::vector<double> preds = predict(model, matrix);
  REQUIRE(preds.size() == 3);
  CHECK(preds[0] == doctest::Approx(p_left).epsilon(1e-15));
  CHECK(preds[1] == doctest::Approx(p_right).epsilon(1e-15));
  CHECK(preds[2] == doctest::Approx(p_left).epsilon(1e-15));

  model.trees[0].nodes[0].default_left = false;
  preds = predict(model, matrix);
  CHECK(preds[0] == doctest::Approx(p_left).epsilon(1e-15));
  CHECK(preds[2] == doctest::Approx(p_right).epsilon(1e-15));
}

TEST_CASE("training handles missing values without poisoning predictions") {
  const Problem problem = make_problem(600, 53, /*missing_rate=*/0.3);
  GbdtParams params;
  params.n_trees = 20;
  params.seed = 9;
  const GbdtModel model = train(problem.matrix, problem.labels, params);
  const std::vector<double> preds = predict(model, problem.matrix);
  for (const double p : preds) {
    CHECK(std::isfinite(p));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  CHECK(model.training_loss.back() < model.training_loss.front());
}

TEST_CASE("model JSON round trip preserves predictions bit-exactly") {
  TempDir dir("gbdt");
  const Problem problem = make_problem(300, 61, /*missing_rate=*/0.1);
  GbdtParams params;
  params.n_trees = 12;
  params.max_leaves = 7;
  params.seed = 3;
  const GbdtModel model = train(problem.matrix, problem.labels, params);
  const std::string path = dir.file("model.json");
  save_model(model, path);
  const GbdtModel loaded = load_model(path);

  CHECK(loaded.feature_names == model.feature_names);
  CHECK(loaded.base_score == model.base_score);
  CHECK(loaded.trees.size() == model.trees.size());
  CHECK(loaded.training_loss == model.training_loss);

  const std::vector<double> before = predict(model, problem.matrix);
  const std::vector<double> after = predict(loaded, problem.matrix);
  REQUIRE(before.size() == after.size());
  CHECK(std::memcmp(before.data(), after.data(),
                    before.size() * sizeof(double)) == 0);
}

TEST_CASE("model loader rejects malformed and foreign files") {
  TempDir dir("gbdt");
  const std::string missing = dir.file("nope.json");
  CHECK_THROWS_AS(load_model(missing), DataError);

  const std::string garbage = dir.file("garbage.json");
  {
    std::ofstream out(garbage);
    out << "this is not json {\n";
  }
  CHECK_THROWS_AS(load_model(garbage), DataError);

  const std::string foreign = dir.file("foreign.json");
  {
    std::ofstream out(foreign);
    out << "{\"format\": \"somebody-else\", \"version\": 1}\n";
  }
  CHECK_THROWS_AS(load_model(foreign), DataError);
}

TEST_CASE("feature importance shares sum to one and rank the signal") {
  const Problem problem = make_problem(800, 71);
  GbdtParams params;
  params.n_trees = 30;
  params.seed = 5;
  const GbdtModel model = train(problem.matrix, problem.labels, params);

  const auto shares = feature_importance(model);
  REQUIRE_FALSE(shares.empty());
  double total = 0.0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    CHECK(shares[i].second > 0.0);
    if (i > 0) CHECK(shares[i].second <= shares[i - 1].second);
    total += shares[i].second;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // The dominant generator signal must outrank the pure-noise column.
  CHECK(shares.front().first == "signal_a");

  GbdtParams stub;
  stub.n_trees = 0;
  const GbdtModel prior_only = train(problem.matrix, problem.labels, stub);
  CHECK(feature_importance(prior_only).empty());
}

TEST_CASE("training is deterministic for a fixed seed") {
  const Problem problem = make_problem(400, 83, /*missing_rate=*/0.2);
  GbdtParams params;
  params.n_trees = 15;
  params.row_subsample = 0.7;
  params.col_subsample = 0.7;
  params.seed = 12;

  const GbdtModel a = train(problem.matrix, problem.labels, params);
  const GbdtModel b = train(problem.matrix, problem.labels, params);
  const std::vector<double> pa = predict(a, problem.matrix);
  const std::vector<double> pb = predict(b, problem.matrix);
  REQUIRE(pa.size() == pb.size());
  CHECK(std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(double)) == 0);

  params.seed = 13;  // a different seed must change the subsampled trees
  const GbdtModel c = train(problem.matrix, problem.labels, params);
  const std::vector<double> pc = predict(c, problem.matrix);
  CHECK(std::memcmp(pa.data(), pc.data(), pa.size() * sizeof(double)) != 0);
}

TEST_CASE("train rejects malformed inputs") {
  const Problem problem = make_problem(50, 97);
  GbdtParams params;
  params.n_trees = 2;

  const FeatureMatrix empty({}, {"x"});
  CHECK_THROWS_AS(train(empty, std::vector<int>{}, params), DataError);

  std::vector<int> short_labels(problem.labels.begin(),
                                problem.labels.end() - 1);
  CHECK_THROWS_AS(train(problem.matrix, short_labels, params), DataError);

  std::vector<int> bad_labels = problem.labels;
  bad_labels[0] = 2;
  CHECK_THROWS_AS(train(problem.matrix, bad_labels, params), DataError);

  std::vector<int> ones(problem.labels.size(), 1);
  CHECK_THROWS_AS(train(problem.matrix, ones, params), DataError);
  // Single-class data trains fine with a zero base score.
  GbdtParams zero_base = params;
  zero_base.base_score_mode = churnpipe::BaseScoreMode::kZero;
  CHECK_NOTHROW(train(problem.matrix, ones, zero_base));
}

TEST_CASE("predict rejects a matrix with mismatched columns") {
  const Problem problem = make_problem(60, 101);
  GbdtParams params;
  params.n_trees = 3;
  const GbdtModel model = train(problem.matrix, problem.labels, params);

  FeatureMatrix renamed(problem.matrix.user_ids(), {"a", "b", "c"});
  CHECK_THROWS_AS(predict(model, renamed), DataError);
}

}  // TEST_SUITE("gbdt")
