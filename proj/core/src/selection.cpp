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

#include "churnpipe/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"
#include "churnpipe/evaluate.hpp"

namespace churnpipe {
namespace {

std::vector<int> join_labels(const FeatureMatrix& matrix,
                             const LabelSet& labels) {
  std::vector<int> y;
  y.reserve(matrix.rows());
  for (const auto& user : matrix.user_ids()) {
    const auto it = labels.labels.find(user);
    if (it == labels.labels.end()) {
      throw DataError("selection: no label for user '" + user + "'");
    }
    y.push_back(it->second);
  }
  return y;
}

double cv_score(const std::vector<std::string>& columns,
                const FeatureMatrix& train_matrix,
                const std::vector<int>& train_labels,
                const FeatureMatrix& cv_matrix,
                const std::vector<int>& cv_labels,
                const GbdtParams& params) {
  GbdtParams p = params;
  if (columns.empty()) p.n_trees = 0;  // prior-only baseline
  const GbdtModel model =
      train(train_matrix.select_columns(columns), train_labels, p);
  return log_loss(cv_labels, predict(model, cv_matrix.select_columns(columns)));
}

// Pearson correlation over rows where both columns are present; 0 when
// either column is degenerate there.
double pairwise_correlation(const FeatureMatrix& matrix, int col_a,
                            int col_b) {
  double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const double a = matrix.at(r, static_cast<std::size_t>(col_a));
    const double b = matrix.at(r, static_cast<std::size_t>(col_b));
    if (is_missing(a) || is_missing(b)) continue;
    ++n;
    sum_a += a;
    sum_b += b;
    sum_aa += a * a;
    sum_bb += b * b;
    sum_ab += a * b;
  }
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double var_a = sum_aa - sum_a * sum_a / nn;
  const double var_b = sum_bb - sum_b * sum_b / nn;
  if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
  const double cov = sum_ab - sum_a * sum_b / nn;
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace

SelectionReport greedy_select(const std::vector<std::string>& candidates,
                              const FeatureMatrix& train_matrix,
                              const std::vector<int>& train_labels,
                              const FeatureMatrix& cv_matrix,
                              const std::vector<int>& cv_labels,
                              const GbdtParams& params, double epsilon,
                              const std::vector<std::string>& seed_accepted) {
  if (epsilon < 0.0) {
    throw ConfigError("selection: epsilon must be >= 0");
  }
  for (const auto& name : candidates) {
    if (train_matrix.column_index(name) < 0 ||
        cv_matrix.column_index(name) < 0) {
      throw DataError("selection: candidate '" + name +
                      "' missing from the train or cv matrix");
    }
  }

  SelectionReport report;
  report.accepted = seed_accepted;
  report.baseline_cv_logloss =
      cv_score({}, train_matrix, train_labels, cv_matrix, cv_labels, params);

  double current = seed_accepted.empty()
                       ? report.baseline_cv_logloss
                       : cv_score(report.accepted, train_matrix, train_labels,
                                  cv_matrix, cv_labels, params);

  for (const auto& name : candidates) {
    std::vector<std::string> with = report.accepted;
    with.push_back(name);
    const double after = cv_score(with, train_matrix, train_labels, cv_matrix,
                                  cv_labels, params);
    SelectionTrial trial;
    trial.feature_name = name;
    trial.cv_logloss_before = current;
    trial.cv_logloss_after = after;
    trial.accepted = after < current - epsilon;
    report.trials.push_back(trial);
    if (trial.accepted) {
      report.accepted = std::move(with);
      current = after;
    }
  }
  return report;
}

SelectionReport greedy_select(const std::vector<std::string>& candidates,
                              const FeatureMatrix& train_matrix,
                              const LabelSet& train_labels,
                              const FeatureMatrix& cv_matrix,
                              const LabelSet& cv_labels,
                              const GbdtParams& params, double epsilon,
                              const std::vector<std::string>& seed_accepted) {
  return greedy_select(candidates, train_matrix,
                       join_labels(train_matrix, train_labels), cv_matrix,
                       join_labels(cv_matrix, cv_labels), params, epsilon,
                       seed_accepted);
}

std::vector<std::string> prune_correlated(
    const FeatureMatrix& matrix, const std::vector<std::string>& accepted,
    double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("selection: correlation threshold must be in (0, 1]");
  }
  std::vector<int> cols;
  cols.reserve(accepted.size());
  for (const auto& name : accepted) {
    const int idx = matrix.column_index(name);
    if (idx < 0) {
      throw DataError("selection: accepted feature '" + name +
                      "' missing from the matrix");
    }
    cols.push_back(idx);
  }

  std::vector<char> dropped(accepted.size(), 0);
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = i + 1; j < accepted.size(); ++j) {
      if (dropped[j]) continue;
      const double rho = pairwise_correlation(matrix, cols[i], cols[j]);
      if (std::abs(rho) >= threshold) dropped[j] = 1;
    }
  }

  std::vector<std::string> out;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (dropped[i]) out.push_back(accepted[i]);
  }
  return out;
}

void write_selection_report(const SelectionReport& report,
                            const std::string& path) {
  CsvWriter writer(path, {"feature_name", "cv_logloss_before",
                          "cv_logloss_after", "accepted"});
  for (const auto& trial : report.trials) {
    writer.write_row({trial.feature_name,
                      format_double(trial.cv_logloss_before),
                      format_double(trial.cv_logloss_after),
                      trial.accepted ? "1" : "0"});
  }
}

void write_accepted_features(const SelectionReport& report,
                             const std::vector<std::string>& final_set,
                             const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "# baseline_cv_logloss=" << format_double(report.baseline_cv_logloss)
      << '\n';
  for (const auto& name : final_set) out << name << '\n';
  if (!out) throw DataError("failed writing: " + path);
}

std::vector<std::string> read_accepted_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open accepted-features file: " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    names.push_back(line);
  }
  return names;
}

}  // namespace churnpipe
