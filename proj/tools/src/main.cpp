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

// churnpipe — command-line front end for the churn prediction pipeline.
//
// Every subcommand except `ensemble` executes one or more pipeline stages
// inside a workspace directory (--out). `run` executes all of them; the
// per-stage subcommands re-run a single stage against artifacts the earlier
// stages already left in the workspace.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 stage failure.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "churnpipe/config.hpp"
#include "churnpipe/error.hpp"
#include "churnpipe/evaluate.hpp"
#include "churnpipe/feature_matrix.hpp"
#include "churnpipe/pipeline.hpp"

namespace {

using churnpipe::ConfigError;
using churnpipe::PipelineConfig;
using churnpipe::PipelineResult;

struct CliArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  bool force = false;

  std::string command;
  std::vector<std::string> stages;  // empty means the whole pipeline

  long long synth_users = -1;
  long long synth_months = -1;
  std::string ingest_dir;

  std::string models;
  std::string matrix_path;
  std::string output_path;
};

PipelineConfig make_config(const CliArgs& args) {
  PipelineConfig config = args.config_path.empty()
                              ? churnpipe::default_config()
                              : churnpipe::load_config(args.config_path);
  if (args.seed_set) {
    config.seed = args.seed;
    config.model_a.seed = args.seed;
    config.model_b.seed = args.seed + 1;
  }
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;

  if (args.command == "synth") {
    config.source = churnpipe::DataSource::kSynth;
    if (args.synth_users >= 0) {
      config.synth_users = static_cast<std::size_t>(args.synth_users);
    }
    if (args.synth_months >= 0) {
      config.synth_months = static_cast<std::size_t>(args.synth_months);
    }
  } else if (args.command == "ingest") {
    config.source = churnpipe::DataSource::kCsv;
    if (!args.ingest_dir.empty()) config.data_dir = args.ingest_dir;
  }
  return config;
}

int run_stages(const CliArgs& args) {
  const PipelineConfig config = make_config(args);
  const PipelineResult result =
      args.stages.empty()
          ? churnpipe::run_pipeline(config, args.force)
          : churnpipe::run_pipeline_stages(config, args.stages, args.force);
  for (const auto& stage : result.stages) {
    if (stage.cached) {
      std::printf("%-10s cached  (input %s)\n", stage.stage.c_str(),
                  stage.input_hash.c_str());
    } else {
      std::printf("%-10s run     (%.1f ms)\n", stage.stage.c_str(),
                  stage.wall_ms);
    }
  }
  const bool evaluated =
      args.stages.empty() ||
      std::find(args.stages.begin(), args.stages.end(), "evaluate") !=
          args.stages.end();
  if (evaluated) {
    std::printf("\n%s", churnpipe::format_report(result.report).c_str());
  }
  return 0;
}

// Parses "path:weight,path:weight,..." into an ensemble spec.
churnpipe::EnsembleSpec parse_members(const std::string& text) {
  churnpipe::EnsembleSpec spec;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find(',', begin);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(begin, end - begin);
    const std::size_t colon = item.rfind(':');
    if (item.empty() || colon == std::string::npos || colon == 0 ||
        colon + 1 == item.size()) {
      throw ConfigError("bad --models entry '" + item +
                        "': expected path:weight");
    }
    churnpipe::EnsembleMember member;
    member.model_path = item.substr(0, colon);
    try {
      std::size_t used = 0;
      member.weight = std::stod(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("bad --models weight in '" + item + "'");
    }
    spec.members.push_back(member);
    begin = end + 1;
  }
  spec.validate();
  return spec;
}

int run_ensemble(const CliArgs& args) {
  const std::string workspace = args.out_dir.empty() ? "out" : args.out_dir;
  const std::string matrix_path = args.matrix_path.empty()
                                      ? workspace + "/matrix_test.bin"
                                      : args.matrix_path;
  const std::string output_path = args.output_path.empty()
                                      ? workspace + "/preds_ensemble.csv"
                                      : args.output_path;
  const churnpipe::EnsembleSpec spec = parse_members(args.models);
  const churnpipe::FeatureMatrix matrix = churnpipe::read_matrix(matrix_path);
  const std::vector<double> preds = churnpipe::ensemble_predict(spec, matrix);
  churnpipe::write_predictions_csv(matrix.user_ids(), preds, output_path);
  std::printf("wrote %zu blended predictions to %s\n", preds.size(),
              output_path.c_str());
  return 0;
}

int dispatch(const CliArgs& args) {
  if (args.command == "ensemble") return run_ensemble(args);
  return run_stages(args);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"churnpipe — churn prediction batch pipeline"};
  app.set_version_flag("--version", "churnpipe 0.1.0");
  app.require_subcommand(1);

  CliArgs args;
  app.add_option("--config", args.config_path,
                 "Pipeline configuration file (INI)");
  auto* seed_opt = app.add_option(
      "--seed", args.seed, "Override the run seed (model seeds follow)");
  app.add_option("--out", args.out_dir,
                 "Workspace directory for artifacts (default: out)");
  app.add_flag("--force", args.force, "Re-run stages even when cached");

  struct SubSpec {
    const char* name;
    const char* help;
    std::vector<std::string> stages;
  };
  const std::vector<SubSpec> subs = {
      {"synth", "Generate a synthetic dataset (data stage, synth source)",
       {"data"}},
      {"ingest", "Load, clean, and normalize raw CSVs (data stage)",
       {"data"}},
      {"label", "Derive churn labels for all three periods", {"label"}},
      {"featurize", "Build feature matrices from the catalog", {"featurize"}},
      {"select", "Greedy forward feature selection on the cv period",
       {"select"}},
      {"train", "Train both ensemble member models", {"train"}},
      {"predict", "Score the test period with both models and the blend",
       {"predict"}},
      {"evaluate", "Score predictions against test labels", {"evaluate"}},
      {"run", "Run the full pipeline end to end", {}},
  };

  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->fallthrough();
    if (std::string_view(sub.name) == "synth") {
      cmd->add_option("--users", args.synth_users,
                      "Number of synthetic users");
      cmd->add_option("--months", args.synth_months,
                      "Number of synthetic history months");
    } else if (std::string_view(sub.name) == "ingest") {
      cmd->add_option("--data", args.ingest_dir,
                      "Directory holding logs.csv, transactions.csv, "
                      "members.csv");
    }
    cmd->callback([&args, sub] {
      args.command = sub.name;
      args.stages = sub.stages;
    });
  }

  CLI::App* ens =
      app.add_subcommand("ensemble", "Blend saved models over a matrix");
  ens->fallthrough();
  ens->add_option("--models", args.models,
                  "Comma-separated model.json:weight pairs")
      ->required();
  ens->add_option("--matrix", args.matrix_path,
                  "Feature matrix (.bin or .csv); default "
                  "<out>/matrix_test.bin");
  ens->add_option("--output", args.output_path,
                  "Predictions CSV to write; default "
                  "<out>/preds_ensemble.csv");
  ens->callback([&args] { args.command = "ensemble"; });

  try {
    app.parse(argc, argv);
    args.seed_set = seed_opt->count() > 0;
    return dispatch(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const churnpipe::StageError& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const churnpipe::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const churnpipe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
