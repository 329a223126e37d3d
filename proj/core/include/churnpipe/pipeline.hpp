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

#ifndef CHURNPIPE_PIPELINE_HPP_
#define CHURNPIPE_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "churnpipe/config.hpp"
#include "churnpipe/evaluate.hpp"

namespace churnpipe {

// FNV-1a over raw bytes; the pipeline's content hash for stage caching.
std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t fnv1a(const std::string& text);
std::uint64_t hash_file(const std::string& path);

// One manifest row.
struct StageResult {
  std::string stage;
  std::string input_hash;   // 16 hex digits over config slice + input files
  std::string output_hash;  // 16 hex digits over the stage's output files
  double wall_ms = 0.0;
  bool cached = false;
};

struct PipelineResult {
  std::vector<StageResult> stages;
  EvalReport report;
};

// Runs data -> label -> featurize -> select -> train -> predict ->
// evaluate, writing every artifact plus manifest.csv under config.out_dir.
// A stage whose input hash matches the cached state and whose outputs are
// intact is skipped unless `force`. Any failure inside a stage surfaces as
// StageError naming that stage.
PipelineResult run_pipeline(const PipelineConfig& config, bool force = false);

// Runs only the named stages (in the order given), assuming earlier
// artifacts already exist under config.out_dir. The manifest then records
// just this invocation.
PipelineResult run_pipeline_stages(const PipelineConfig& config,
                                   const std::vector<std::string>& stages,
                                   bool force = false);

// Stage names in execution order, as they appear in the manifest.
const std::vector<std::string>& pipeline_stage_names();

}  // namespace churnpipe

#endif  // CHURNPIPE_PIPELINE_HPP_
