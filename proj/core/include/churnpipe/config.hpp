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

#ifndef CHURNPIPE_CONFIG_HPP_
#define CHURNPIPE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "churnpipe/gbdt.hpp"
#include "churnpipe/temporal.hpp"

namespace churnpipe {

enum class DataSource {
  kSynth,  // generate_synthetic with the synth_* parameters
  kCsv,    // read logs/transactions/members CSVs from data_dir
};

// Everything a full pipeline run needs. The file format is INI-style:
// `[section]` headers, `key = value` lines, `#` comment lines. Unset keys
// keep the defaults below. See README for the full grammar and key list.
struct PipelineConfig {
  // [data]
  DataSource source = DataSource::kSynth;
  std::string data_dir;    // required when source = csv
  int synth_users = 2000;
  int synth_months = 6;

  // [periods] — defaults are the three 2017 calendar months with
  // end-of-period anchors.
  PeriodSplits periods = default_periods();

  // [features]
  std::string catalog_path;  // empty -> builtin catalog

  // [selection]
  bool selection_enabled = true;
  double selection_epsilon = 1e-5;
  double correlation_threshold = 0.95;
  // Boosting rounds per selection trial; 0 means use the full n_trees.
  int selection_trial_trees = 40;

  // [model.a] / [model.b] — the two ensemble members. A grows depth-wise,
  // B leaf-wise by default.
  GbdtParams model_a;
  GbdtParams model_b;

  // [ensemble]
  double weight_a = 0.88;
  double weight_b = 0.12;

  // [run]
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

// The built-in defaults (equivalent to an empty config file).
PipelineConfig default_config();

// Semantic validation: every violated invariant produces one message;
// empty means the config is sound.
std::vector<std::string> config_errors(const PipelineConfig& config);

struct ConfigParseResult {
  PipelineConfig config;
  std::vector<std::string> errors;  // syntax and semantic, all collected
};

// Parses and validates without throwing; all problems land in `errors`.
ConfigParseResult parse_config_text(const std::string& text);

// Loads, parses, and validates; throws ConfigError carrying every collected
// message when anything is wrong.
PipelineConfig load_config(const std::string& path);

}  // namespace churnpipe

#endif  // CHURNPIPE_CONFIG_HPP_
