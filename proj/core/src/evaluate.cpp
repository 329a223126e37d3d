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

#include "churnpipe/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"
#include "churnpipe/gbdt.hpp"

namespace churnpipe {

double log_loss(const std::vector<int>& labels,
                const std::vector<double>& preds, double clip_eps) {
  if (labels.empty()) throw DataError("log_loss on empty vectors");
  if (labels.size() != preds.size()) {
    throw DataError("log_loss length mismatch: " +
                    std::to_string(labels.size()) + " labels vs " +
                    std::to_string(preds.size()) + " predictions");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p =
        std::clamp(preds[i], clip_eps, 1.0 - clip_eps);
    sum += labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return -sum / static_cast<double>(labels.size());
}

void EnsembleSpec::validate() const {
  if (members.empty()) {
    throw ConfigError("ensemble needs at least one member");
  }
  double total = 0.0;
  for (const auto& m : members) {
    if (m.weight < 0.0) {
      throw ConfigError("ensemble weight for '" + m.model_path +
                        "' is negative");
    }
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("ensemble weights must sum to 1, got " +
                      std::to_string(total));
  }
}

std::vector<double> weighted_average(
    const std::vector<std::vector<double>>& member_preds,
    const std::vector<double>& weights) {
  if (member_preds.empty() || member_preds.size() != weights.size()) {
    throw ConfigError("weighted_average needs one weight per member");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (w < 0.0) throw ConfigError("ensemble weight is negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("ensemble weights must sum to 1, got " +
                      std::to_string(total));
  }
  const std::size_t n = member_preds[0].size();
  for (const auto& preds : member_preds) {
    if (preds.size() != n) {
      throw DataError("ensemble member prediction lengths differ");
    }
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < member_preds.size(); ++j) {
    const double w = weights[j];
    for (std::size_t i = 0; i < n; ++i) out[i] += w * member_preds[j][i];
  }
  return out;
}

std::vector<double> ensemble_predict(const EnsembleSpec& spec,
                                     const FeatureMatrix& matrix) {
  spec.validate();
  std::vector<std::vector<double>> member_preds;
  std::vector<double> weights;
  member_preds.reserve(spec.members.size());
  for (const auto& member : spec.members) {
    const GbdtModel model = load_model(member.model_path);
    // Models may use a subset of the matrix columns; align per member.
    if (model.feature_names == matrix.feature_names()) {
      member_preds.push_back(predict(model, matrix));
    } else {
      member_preds.push_back(
          predict(model, matrix.select_columns(model.feature_names)));
    }
    weights.push_back(member.weight);
  }
  return weighted_average(member_preds, weights);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << "period:    " << report.period_name << '\n';
  out << "users:     " << report.n_users << '\n';
  out << "base rate: " << format_double(report.churn_base_rate) << '\n';
  out << "log loss:  " << format_double(report.log_loss_value) << '\n';
  for (const auto& [name, score] : report.model_scores) {
    out << "  model " << name << ": " << format_double(score) << '\n';
  }
  if (!report.importance.empty()) {
    out << "feature importance (gain share):\n";
    for (const auto& [name, share] : report.importance) {
      out << "  " << name << ": " << format_double(share) << '\n';
    }
  }
  return out.str();
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  CsvWriter writer(path, {"metric", "name", "value"});
  writer.write_row({"period", report.period_name, ""});
  writer.write_row({"n_users", "", std::to_string(report.n_users)});
  writer.write_row({"base_rate", "", format_double(report.churn_base_rate)});
  writer.write_row({"log_loss", "", format_double(report.log_loss_value)});
  for (const auto& [name, score] : report.model_scores) {
    writer.write_row({"model_log_loss", name, format_double(score)});
  }
  for (const auto& [name, share] : report.importance) {
    writer.write_row({"importance", name, format_double(share)});
  }
}

void write_predictions_csv(const std::vector<UserId>& user_ids,
                           const std::vector<double>& preds,
                           const std::string& path) {
  if (user_ids.size() != preds.size()) {
    throw DataError("predictions and user ids differ in length");
  }
  CsvWriter writer(path, {"user_id", "is_churn_probability"});
  for (std::size_t i = 0; i < user_ids.size(); ++i) {
    writer.write_row({user_ids[i], format_double(preds[i])});
  }
}

std::vector<std::pair<UserId, double>> read_predictions_csv(
    const std::string& path) {
  CsvReader reader(path);
  const int id_col = reader.column_index("user_id");
  const int p_col = reader.column_index("is_churn_probability");
  if (id_col < 0 || p_col < 0) {
    throw DataError("predictions CSV needs user_id and "
                    "is_churn_probability columns: " +
                    path);
  }
  std::vector<std::pair<UserId, double>> out;
  while (auto row = reader.next_row()) {
    try {
      out.emplace_back((*row)[static_cast<std::size_t>(id_col)],
                       std::stod((*row)[static_cast<std::size_t>(p_col)]));
    } catch (const std::exception&) {
      throw DataError("bad probability cell in " + path);
    }
  }
  return out;
}

}  // namespace churnpipe
