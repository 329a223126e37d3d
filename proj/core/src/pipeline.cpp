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

#include "churnpipe/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"
#include "churnpipe/feature_spec.hpp"
#include "churnpipe/features.hpp"
#include "churnpipe/gbdt.hpp"
#include "churnpipe/ingest.hpp"
#include "churnpipe/labeling.hpp"
#include "churnpipe/selection.hpp"
#include "churnpipe/synth.hpp"

namespace churnpipe {
namespace {

namespace fs = std::filesystem;

std::string to_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string period_slice(const TimePeriod& p) {
  std::ostringstream out;
  out << p.name << ':' << p.start.to_yyyymmdd() << ".."
      << p.end.to_yyyymmdd() << '@' << p.anchor.to_yyyymmdd();
  return out.str();
}

std::string params_slice(const GbdtParams& p) {
  std::ostringstream out;
  out << "trees=" << p.n_trees << " lr=" << format_double(p.learning_rate)
      << " leaves=" << p.max_leaves << " depth=" << p.max_depth << " growth="
      << (p.growth == GrowthStrategy::kDepthWise ? "depth" : "leaf")
      << " bins=" << p.n_bins << " l2=" << format_double(p.lambda_l2)
      << " gamma=" << format_double(p.gamma_min_gain)
      << " mch=" << format_double(p.min_child_hessian)
      << " rs=" << format_double(p.row_subsample)
      << " cs=" << format_double(p.col_subsample) << " seed=" << p.seed
      << " base="
      << (p.base_score_mode == BaseScoreMode::kPriorLogodds ? "prior"
                                                            : "zero");
  return out.str();
}

std::vector<int> join_labels(const FeatureMatrix& matrix,
                             const LabelSet& labels) {
  std::vector<int> y;
  y.reserve(matrix.rows());
  for (const auto& user : matrix.user_ids()) {
    const auto it = labels.labels.find(user);
    if (it == labels.labels.end()) {
      throw DataError("no label for user '" + user + "'");
    }
    y.push_back(it->second);
  }
  return y;
}

EvalReport parse_report_csv(const std::string& path) {
  CsvReader reader(path);
  EvalReport report;
  while (auto row = reader.next_row()) {
    const std::string& metric = (*row)[0];
    const std::string& name = (*row)[1];
    const std::string& value = (*row)[2];
    if (metric == "period") report.period_name = name;
    else if (metric == "n_users") report.n_users = std::stoull(value);
    else if (metric == "base_rate") report.churn_base_rate = std::stod(value);
    else if (metric == "log_loss") report.log_loss_value = std::stod(value);
    else if (metric == "model_log_loss") {
      report.model_scores.emplace_back(name, std::stod(value));
    } else if (metric == "importance") {
      report.importance.emplace_back(name, std::stod(value));
    }
  }
  return report;
}

// Runs the stages, caching on content hashes: a stage whose inputs (config
// slice plus input-file bytes) and outputs are both unchanged is skipped.
class PipelineRun {
 public:
  PipelineRun(const PipelineConfig& config, bool force)
      : config_(config), force_(force), out_(config.out_dir) {}

  PipelineResult run(const std::vector<std::string>& stages) {
    preflight();
    fs::create_directories(out_ / "data");
    fs::create_directories(out_ / ".cache");

    for (const auto& name : stages) {
      if (name == "data") stage_data();
      else if (name == "label") stage_label();
      else if (name == "featurize") stage_featurize();
      else if (name == "select") stage_select();
      else if (name == "train") stage_train();
      else if (name == "predict") stage_predict();
      else if (name == "evaluate") stage_evaluate();
      else throw ConfigError("unknown pipeline stage: " + name);
    }

    write_manifest();
    return std::move(result_);
  }

 private:
  std::string path(const std::string& rel) const {
    return (out_ / rel).string();
  }

  // Config invariants and referenced paths are checked before any stage
  // runs, so a bad config can never leave partial artifacts behind.
  void preflight() const {
    const auto errors = config_errors(config_);
    if (!errors.empty()) {
      std::string message = "invalid pipeline config:";
      for (const auto& e : errors) message += "\n  - " + e;
      throw ConfigError(message);
    }
    if (config_.source == DataSource::kCsv) {
      for (const char* name :
           {"logs.csv", "transactions.csv", "members.csv"}) {
        const fs::path p = fs::path(config_.data_dir) / name;
        if (!fs::exists(p)) {
          throw ConfigError("referenced data file does not exist: " +
                            p.string());
        }
      }
    }
    if (!config_.catalog_path.empty() && !fs::exists(config_.catalog_path)) {
      throw ConfigError("referenced catalog does not exist: " +
                        config_.catalog_path);
    }
  }

  // The catalog text actually in force: the named file, normalized, or the
  // builtin set.
  std::string catalog_text() const {
    if (config_.catalog_path.empty()) return builtin_catalog_text();
    return format_catalog(load_catalog(config_.catalog_path));
  }

  void run_stage(const std::string& name, const std::string& config_slice,
                 const std::vector<std::string>& input_files,
                 const std::vector<std::string>& output_files,
                 const std::function<void()>& body) {
    StageResult stage;
    stage.stage = name;

    std::ostringstream input_key;
    input_key << name << '\n' << config_slice << '\n';
    for (const auto& file : input_files) {
      try {
        input_key << to_hex(hash_file(path(file))) << '\n';
      } catch (const Error& e) {
        throw StageError(name, e.what());
      }
    }
    stage.input_hash = to_hex(fnv1a(input_key.str()));

    const std::string state_path = path(".cache/" + name + ".state");
    if (!force_ && is_cached(state_path, stage.input_hash, output_files,
                             &stage.output_hash)) {
      stage.cached = true;
      result_.stages.push_back(stage);
      return;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      throw StageError(name, e.what());
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    stage.wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();

    stage.output_hash = hash_outputs(output_files);
    std::ofstream state(state_path, std::ios::trunc);
    state << "input=" << stage.input_hash << '\n'
          << "output=" << stage.output_hash << '\n';
    for (const auto& file : output_files) state << "file=" << file << '\n';
    result_.stages.push_back(stage);
  }

  std::string hash_outputs(const std::vector<std::string>& output_files) {
    std::ostringstream key;
    for (const auto& file : output_files) {
      key << to_hex(hash_file(path(file))) << '\n';
    }
    return to_hex(fnv1a(key.str()));
  }

  bool is_cached(const std::string& state_path,
                 const std::string& input_hash,
                 const std::vector<std::string>& output_files,
                 std::string* output_hash) {
    std::ifstream state(state_path);
    if (!state) return false;
    std::string line;
    std::string recorded_input, recorded_output;
    while (std::getline(state, line)) {
      if (line.rfind("input=", 0) == 0) recorded_input = line.substr(6);
      if (line.rfind("output=", 0) == 0) recorded_output = line.substr(7);
    }
    if (recorded_input != input_hash) return false;
    for (const auto& file : output_files) {
      if (!fs::exists(path(file))) return false;
    }
    // Rehash outputs so hand-edited artifacts invalidate the cache.
    const std::string actual = hash_outputs(output_files);
    if (actual != recorded_output) return false;
    *output_hash = actual;
    return true;
  }

  // --- stages ------------------------------------------------------------

  void stage_data() {
    std::string slice;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs = {"data/logs.csv",
                                        "data/transactions.csv",
                                        "data/members.csv"};
    if (config_.source == DataSource::kSynth) {
      slice = "synth users=" + std::to_string(config_.synth_users) +
              " months=" + std::to_string(config_.synth_months) +
              " seed=" + std::to_string(config_.seed);
      outputs.push_back("data/churn_odds.csv");
    } else {
      // The upstream files live outside out_dir, so their content goes into
      // the config slice rather than the relative input list.
      slice = "csv";
      for (const char* name :
           {"logs.csv", "transactions.csv", "members.csv"}) {
        const fs::path p = fs::path(config_.data_dir) / name;
        slice += "\n" + to_hex(hash_file(p.string()));
      }
    }
    run_stage("data", slice, inputs, outputs, [&] {
      if (config_.source == DataSource::kSynth) {
        SynthResult synth = generate_synthetic(
            config_.synth_users, config_.synth_months, config_.seed);
        synth.dataset = clean(std::move(synth.dataset));
        write_dataset(synth.dataset, path("data"));
        write_churn_odds(synth, path("data"));
      } else {
        Dataset dataset = clean(load_dataset(config_.data_dir));
        write_dataset(dataset, path("data"));
      }
    });
  }

  void stage_label() {
    const std::string slice = period_slice(config_.periods.train) + ";" +
                              period_slice(config_.periods.cv) + ";" +
                              period_slice(config_.periods.test);
    run_stage(
        "label", slice, {"data/transactions.csv"},
        {"labels_train.csv", "labels_cv.csv", "labels_test.csv"}, [&] {
          const Dataset dataset = load_dataset(path("data"));
          const LabelSplits labels = relabel_all(dataset, config_.periods);
          write_labels(labels.train, path("labels_train.csv"));
          write_labels(labels.cv, path("labels_cv.csv"));
          write_labels(labels.test, path("labels_test.csv"));
        });
  }

  void stage_featurize() {
    const std::string catalog = catalog_text();
    const std::string slice =
        period_slice(config_.periods.train) + ";" +
        period_slice(config_.periods.cv) + ";" +
        period_slice(config_.periods.test) + "\n" + catalog;
    run_stage(
        "featurize", slice,
        {"data/logs.csv", "data/transactions.csv", "data/members.csv",
         "labels_train.csv", "labels_cv.csv", "labels_test.csv"},
        {"catalog.txt", "matrix_train.bin", "matrix_cv.bin",
         "matrix_test.bin"},
        [&] {
          std::ofstream catalog_out(path("catalog.txt"), std::ios::trunc);
          catalog_out << catalog;
          catalog_out.close();

          const Dataset dataset = load_dataset(path("data"));
          const auto specs = parse_catalog(catalog);
          validate_catalog(specs);
          const std::pair<const TimePeriod*, const char*> jobs[] = {
              {&config_.periods.train, "train"},
              {&config_.periods.cv, "cv"},
              {&config_.periods.test, "test"},
          };
          for (const auto& [period, tag] : jobs) {
            const LabelSet labels =
                read_labels(path(std::string("labels_") + tag + ".csv"));
            std::vector<UserId> population;
            population.reserve(labels.labels.size());
            for (const auto& [user, label] : labels.labels) {
              population.push_back(user);
            }
            const FeatureMatrix matrix =
                build_features(dataset, specs, *period, population);
            write_matrix(matrix,
                         path(std::string("matrix_") + tag + ".bin"));
          }
        });
  }

  GbdtParams trial_params() const {
    GbdtParams params = config_.model_a;
    if (config_.selection_trial_trees > 0) {
      params.n_trees = config_.selection_trial_trees;
    }
    return params;
  }

  void stage_select() {
    std::string slice = "enabled=" +
                        std::string(config_.selection_enabled ? "1" : "0") +
                        " epsilon=" + format_double(config_.selection_epsilon) +
                        " corr=" + format_double(config_.correlation_threshold);
    if (config_.selection_enabled) slice += " " + params_slice(trial_params());
    run_stage(
        "select", slice,
        {"matrix_train.bin", "matrix_cv.bin", "labels_train.csv",
         "labels_cv.csv"},
        {"selection_report.csv", "accepted_features.txt"}, [&] {
          const FeatureMatrix train_matrix =
              read_matrix(path("matrix_train.bin"));
          if (!config_.selection_enabled) {
            SelectionReport report;
            write_selection_report(report, path("selection_report.csv"));
            write_accepted_features(report, train_matrix.feature_names(),
                                    path("accepted_features.txt"));
            return;
          }
          const FeatureMatrix cv_matrix = read_matrix(path("matrix_cv.bin"));
          const LabelSet train_labels =
              read_labels(path("labels_train.csv"));
          const LabelSet cv_labels = read_labels(path("labels_cv.csv"));
          const SelectionReport report = greedy_select(
              train_matrix.feature_names(), train_matrix, train_labels,
              cv_matrix, cv_labels, trial_params(),
              config_.selection_epsilon);
          const auto dropped =
              prune_correlated(train_matrix, report.accepted,
                               config_.correlation_threshold);
          std::vector<std::string> final_set;
          for (const auto& name : report.accepted) {
            if (std::find(dropped.begin(), dropped.end(), name) ==
                dropped.end()) {
              final_set.push_back(name);
            }
          }
          write_selection_report(report, path("selection_report.csv"));
          write_accepted_features(report, final_set,
                                  path("accepted_features.txt"));
        });
  }

  void stage_train() {
    const std::string slice =
        "a{" + params_slice(config_.model_a) + "} b{" +
        params_slice(config_.model_b) + "}";
    run_stage(
        "train", slice,
        {"matrix_train.bin", "labels_train.csv", "accepted_features.txt"},
        {"model_a.json", "model_b.json"}, [&] {
          const auto accepted =
              read_accepted_features(path("accepted_features.txt"));
          const FeatureMatrix matrix =
              read_matrix(path("matrix_train.bin")).select_columns(accepted);
          const LabelSet labels = read_labels(path("labels_train.csv"));
          const std::vector<int> y = join_labels(matrix, labels);
          save_model(train(matrix, y, config_.model_a), path("model_a.json"));
          save_model(train(matrix, y, config_.model_b), path("model_b.json"));
        });
  }

  void stage_predict() {
    const std::string slice =
        "weights=" + format_double(config_.weight_a) + "," +
        format_double(config_.weight_b);
    run_stage(
        "predict", slice,
        {"model_a.json", "model_b.json", "matrix_test.bin",
         "accepted_features.txt"},
        {"preds_a_test.csv", "preds_b_test.csv", "preds_ensemble_test.csv"},
        [&] {
          const auto accepted =
              read_accepted_features(path("accepted_features.txt"));
          const FeatureMatrix matrix =
              read_matrix(path("matrix_test.bin")).select_columns(accepted);
          const GbdtModel model_a = load_model(path("model_a.json"));
          const GbdtModel model_b = load_model(path("model_b.json"));
          const auto preds_a = predict(model_a, matrix);
          const auto preds_b = predict(model_b, matrix);
          const auto blended = weighted_average(
              {preds_a, preds_b}, {config_.weight_a, config_.weight_b});
          write_predictions_csv(matrix.user_ids(), preds_a,
                                path("preds_a_test.csv"));
          write_predictions_csv(matrix.user_ids(), preds_b,
                                path("preds_b_test.csv"));
          write_predictions_csv(matrix.user_ids(), blended,
                                path("preds_ensemble_test.csv"));
        });
  }

  void stage_evaluate() {
    run_stage(
        "evaluate", "",
        {"preds_a_test.csv", "preds_b_test.csv", "preds_ensemble_test.csv",
         "labels_test.csv", "labels_train.csv", "model_a.json"},
        {"report.csv", "report.txt"}, [&] {
          const LabelSet test_labels = read_labels(path("labels_test.csv"));
          const LabelSet train_labels =
              read_labels(path("labels_train.csv"));

          const auto score = [&](const std::string& file) {
            const auto preds = read_predictions_csv(path(file));
            std::vector<int> y;
            std::vector<double> p;
            y.reserve(preds.size());
            for (const auto& [user, prob] : preds) {
              const auto it = test_labels.labels.find(user);
              if (it == test_labels.labels.end()) {
                throw DataError("prediction for unlabeled user '" + user +
                                "'");
              }
              y.push_back(it->second);
              p.push_back(prob);
            }
            return log_loss(y, p);
          };

          EvalReport report;
          report.period_name = config_.periods.test.name;
          report.n_users = test_labels.labels.size();
          report.churn_base_rate = test_labels.churn_rate();
          report.log_loss_value = score("preds_ensemble_test.csv");
          report.model_scores.emplace_back("model_a",
                                           score("preds_a_test.csv"));
          report.model_scores.emplace_back("model_b",
                                           score("preds_b_test.csv"));

          // Constant-prior reference: the train-period churn rate applied
          // to every test user.
          const double prior = train_labels.churn_rate();
          std::vector<int> y;
          y.reserve(test_labels.labels.size());
          for (const auto& [user, label] : test_labels.labels) {
            y.push_back(label);
          }
          const std::vector<double> prior_preds(y.size(), prior);
          report.model_scores.emplace_back("prior_baseline",
                                           log_loss(y, prior_preds));

          report.importance =
              feature_importance(load_model(path("model_a.json")));

          write_report_csv(report, path("report.csv"));
          std::ofstream text(path("report.txt"), std::ios::trunc);
          text << format_report(report);
          result_.report = std::move(report);
        });
    if (result_.stages.back().cached) {
      result_.report = parse_report_csv(path("report.csv"));
    }
  }

  void write_manifest() {
    CsvWriter writer(path("manifest.csv"),
                     {"stage", "input_hash", "output_hash", "wall_ms",
                      "status"});
    for (const auto& stage : result_.stages) {
      writer.write_row({stage.stage, stage.input_hash, stage.output_hash,
                        format_double(stage.wall_ms),
                        stage.cached ? "cached" : "run"});
    }
  }

  const PipelineConfig& config_;
  const bool force_;
  const fs::path out_;
  PipelineResult result_;
};

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 14695981039346656037ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t fnv1a(const std::string& text) {
  return fnv1a(text.data(), text.size());
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash missing file: " + path);
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[64 * 1024];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

const std::vector<std::string>& pipeline_stage_names() {
  static const std::vector<std::string> names = {
      "data",  "label", "featurize", "select",
      "train", "predict", "evaluate"};
  return names;
}

PipelineResult run_pipeline(const PipelineConfig& config, bool force) {
  return PipelineRun(config, force).run(pipeline_stage_names());
}

PipelineResult run_pipeline_stages(const PipelineConfig& config,
                                   const std::vector<std::string>& stages,
                                   bool force) {
  return PipelineRun(config, force).run(stages);
}

}  // namespace churnpipe
