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

// Microbenchmarks for the booster's hot loops: histogram accumulation
// (the per-node scan), the sibling-subtraction shortcut it competes with,
// split search, quantile binning, and end-to-end training.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/gbdt.hpp"

namespace {

using churnpipe::BinMap;
using churnpipe::FeatureHistogram;
using churnpipe::FeatureMatrix;
using churnpipe::GbdtParams;

struct HistogramInputs {
  std::vector<std::uint16_t> binned;
  std::vector<std::uint32_t> rows;
  std::vector<double> grad;
  std::vector<double> hess;
};

HistogramInputs make_histogram_inputs(std::size_t n_rows, int n_bins,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  HistogramInputs inputs;
  inputs.binned.resize(n_rows);
  inputs.rows.resize(n_rows);
  inputs.grad.resize(n_rows);
  inputs.hess.resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    inputs.binned[r] = static_cast<std::uint16_t>(
        rng() % static_cast<std::uint64_t>(n_bins));
    inputs.rows[r] = static_cast<std::uint32_t>(r);
    inputs.grad[r] = 2.0 * unit(rng) - 1.0;
    inputs.hess[r] = 0.25 * unit(rng);
  }
  return inputs;
}

// A learnable binary problem: two informative columns, the rest noise.
struct Problem {
  FeatureMatrix matrix;
  std::vector<int> labels;
};

Problem make_problem(std::size_t n_rows, std::size_t n_features,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<churnpipe::UserId> ids(n_rows);
  std::vector<std::string> names(n_features);
  for (std::size_t r = 0; r < n_rows; ++r) ids[r] = "u" + std::to_string(r);
  for (std::size_t f = 0; f < n_features; ++f) {
    names[f] = "f" + std::to_string(f);
  }
  Problem problem{FeatureMatrix(std::move(ids), std::move(names)), {}};
  problem.labels.resize(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    double z = 0.0;
    for (std::size_t f = 0; f < n_features; ++f) {
      const double v = unit(rng);
      problem.matrix.set(r, f, v);
      if (f == 0) z += 4.0 * (v - 0.5);
      if (f == 1) z -= 2.0 * (v - 0.5);
    }
    problem.labels[r] = unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  return problem;
}

void BM_BuildHistogram(benchmark::State& state) {
  const auto n_rows = static_cast<std::size_t>(state.range(0));
  const int n_bins = 33;  // 32 value bins + the missing bin
  const HistogramInputs inputs = make_histogram_inputs(n_rows, n_bins, 1);
  for (auto _ : state) {
    FeatureHistogram hist = churnpipe::build_histogram(
        inputs.binned, n_bins, inputs.rows, inputs.grad, inputs.hess);
    benchmark::DoNotOptimize(hist.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_rows));
}
BENCHMARK(BM_BuildHistogram)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16);

// The sibling trick: a child's histogram by subtraction costs O(bins)
// regardless of row count. Run it against BM_BuildHistogram at the same
// row counts to see what the scan would have cost.
void BM_SubtractHistogram(benchmark::State& state) {
  const auto n_rows = static_cast<std::size_t>(state.range(0));
  const int n_bins = 33;
  const HistogramInputs inputs = make_histogram_inputs(n_rows, n_bins, 2);
  std::vector<std::uint32_t> half(inputs.rows.begin(),
                                  inputs.rows.begin() + n_rows / 2);
  const FeatureHistogram parent = churnpipe::build_histogram(
      inputs.binned, n_bins, inputs.rows, inputs.grad, inputs.hess);
  const FeatureHistogram child = churnpipe::build_histogram(
      inputs.binned, n_bins, half, inputs.grad, inputs.hess);
  for (auto _ : state) {
    FeatureHistogram sibling = churnpipe::subtract_histogram(parent, child);
    benchmark::DoNotOptimize(sibling.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_rows));
}
BENCHMARK(BM_SubtractHistogram)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16);

void BM_BestSplit(benchmark::State& state) {
  const int n_bins = static_cast<int>(state.range(0));
  const HistogramInputs inputs =
      make_histogram_inputs(1 << 14, n_bins + 1, 3);
  const FeatureHistogram hist = churnpipe::build_histogram(
      inputs.binned, n_bins + 1, inputs.rows, inputs.grad, inputs.hess);
  GbdtParams params;
  for (auto _ : state) {
    auto decision = churnpipe::best_split(hist, params);
    benchmark::DoNotOptimize(decision);
  }
}
BENCHMARK(BM_BestSplit)->Arg(32)->Arg(128)->Arg(255);

void BM_QuantileBins(benchmark::State& state) {
  const auto n_rows = static_cast<std::size_t>(state.range(0));
  const Problem problem = make_problem(n_rows, 8, 4);
  for (auto _ : state) {
    BinMap bins = BinMap::fit(problem.matrix, 32);
    benchmark::DoNotOptimize(&bins);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_rows) * 8);
}
BENCHMARK(BM_QuantileBins)->Arg(1 << 13)->Arg(1 << 15);

void BM_Train(benchmark::State& state) {
  const auto n_rows = static_cast<std::size_t>(state.range(0));
  const Problem problem = make_problem(n_rows, 8, 5);
  GbdtParams params;
  params.n_trees = 20;
  params.max_leaves = 31;
  params.seed = 1;
  for (auto _ : state) {
    auto model = churnpipe::train(problem.matrix, problem.labels, params);
    benchmark::DoNotOptimize(&model);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_rows) *
                          params.n_trees);
}
BENCHMARK(BM_Train)->Arg(1 << 11)->Arg(1 << 13)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto n_rows = static_cast<std::size_t>(state.range(0));
  const Problem problem = make_problem(n_rows, 8, 6);
  GbdtParams params;
  params.n_trees = 20;
  params.max_leaves = 31;
  params.seed = 1;
  const auto model = churnpipe::train(problem.matrix, problem.labels, params);
  for (auto _ : state) {
    auto preds = churnpipe::predict(model, problem.matrix);
    benchmark::DoNotOptimize(preds.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_rows));
}
BENCHMARK(BM_Predict)->Arg(1 << 13)->Arg(1 << 15);

}  // namespace
