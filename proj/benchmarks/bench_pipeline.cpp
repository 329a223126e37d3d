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

// Microbenchmarks for the data-side stages: synthetic generation,
// churn labeling, and feature-matrix construction over the built-in
// catalog. Row counts scale with the user count argument.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/feature_spec.hpp"
#include "churnpipe/features.hpp"
#include "churnpipe/labeling.hpp"
#include "churnpipe/synth.hpp"
#include "churnpipe/temporal.hpp"

namespace {

using churnpipe::LabelSet;
using churnpipe::UserId;

void BM_GenerateSynthetic(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = churnpipe::generate_synthetic(users, 6, 1);
    benchmark::DoNotOptimize(&result);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          users);
}
BENCHMARK(BM_GenerateSynthetic)
    ->Arg(1000)
    ->Arg(5000)
    ->Unit(benchmark::kMillisecond);

void BM_LabelChurn(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  const auto synth = churnpipe::generate_synthetic(users, 6, 1);
  const auto period = churnpipe::default_periods().train;
  for (auto _ : state) {
    LabelSet labels =
        churnpipe::label_churn(synth.dataset.transactions, period);
    benchmark::DoNotOptimize(&labels);
  }
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations()) *
      static_cast<std::int64_t>(synth.dataset.transactions.size()));
}
BENCHMARK(BM_LabelChurn)->Arg(1000)->Arg(5000);

void BM_BuildFeatures(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  const auto synth = churnpipe::generate_synthetic(users, 6, 1);
  const auto catalog = churnpipe::builtin_catalog();
  const auto period = churnpipe::default_periods().train;
  const LabelSet labels =
      churnpipe::label_churn(synth.dataset.transactions, period);
  std::vector<UserId> population;
  population.reserve(labels.size());
  for (const auto& [uid, y] : labels.labels) population.push_back(uid);
  for (auto _ : state) {
    auto matrix =
        churnpipe::build_features(synth.dataset, catalog, period, population);
    benchmark::DoNotOptimize(&matrix);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(population.size()) *
                          static_cast<std::int64_t>(catalog.size()));
}
BENCHMARK(BM_BuildFeatures)
    ->Arg(1000)
    ->Arg(5000)
    ->Unit(benchmark::kMillisecond);

}  // namespace
