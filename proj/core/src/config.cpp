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

#include "churnpipe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "churnpipe/error.hpp"

namespace churnpipe {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Collects `section.key = value` triples plus syntax diagnostics.
struct RawConfig {
  std::vector<std::tuple<std::string, std::string, std::string>> entries;
  std::vector<std::string> errors;
};

RawConfig scan_ini(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        raw.errors.push_back("line " + std::to_string(line_no) +
                             ": malformed section header '" + t + "'");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      raw.errors.push_back("line " + std::to_string(line_no) +
                           ": expected 'key = value', got '" + t + "'");
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      raw.errors.push_back("line " + std::to_string(line_no) +
                           ": empty key");
      continue;
    }
    raw.entries.emplace_back(section, key, value);
  }
  return raw;
}

// Typed value parsers; failures append to `errors` and leave the target
// untouched so later checks still see a usable config.
class Assigner {
 public:
  Assigner(std::string context, std::string value,
           std::vector<std::string>& errors)
      : context_(std::move(context)),
        value_(std::move(value)),
        errors_(errors) {}

  void to(int& out) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(value_, &pos);
      if (pos != value_.size()) throw std::invalid_argument(value_);
      out = v;
    } catch (const std::exception&) {
      fail("an integer");
    }
  }
  void to(double& out) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value_, &pos);
      if (pos != value_.size()) throw std::invalid_argument(value_);
      out = v;
    } catch (const std::exception&) {
      fail("a number");
    }
  }
  void to(std::uint64_t& out) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(value_, &pos);
      if (pos != value_.size()) throw std::invalid_argument(value_);
      out = static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      fail("an unsigned integer");
    }
  }
  void to(bool& out) {
    if (value_ == "true" || value_ == "1" || value_ == "on") {
      out = true;
    } else if (value_ == "false" || value_ == "0" || value_ == "off") {
      out = false;
    } else {
      fail("true/false");
    }
  }
  void to(std::string& out) { out = value_; }

 private:
  void fail(const std::string& expected) {
    errors_.push_back(context_ + ": expected " + expected + ", got '" +
                      value_ + "'");
  }
  std::string context_;
  std::string value_;
  std::vector<std::string>& errors_;
};

// Accepts 2017-01-31 or 20170131.
bool parse_config_date(const std::string& text, CalendarDate* out) {
  int y = 0, m = 0, d = 0;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    try {
      y = std::stoi(text.substr(0, 4));
      m = std::stoi(text.substr(5, 2));
      d = std::stoi(text.substr(8, 2));
    } catch (const std::exception&) {
      return false;
    }
  } else if (text.size() == 8 &&
             std::all_of(text.begin(), text.end(),
                         [](char c) { return c >= '0' && c <= '9'; })) {
    y = std::stoi(text.substr(0, 4));
    m = std::stoi(text.substr(4, 2));
    d = std::stoi(text.substr(6, 2));
  } else {
    return false;
  }
  if (!CalendarDate::is_valid_ymd(y, m, d)) return false;
  *out = CalendarDate::from_ymd(y, m, d);
  return true;
}

// `2017-01-01..2017-01-31`; the anchor defaults to the end date.
void parse_period(const std::string& value, const std::string& context,
                  TimePeriod* period, std::vector<std::string>& errors) {
  const auto sep = value.find("..");
  CalendarDate start, end;
  if (sep == std::string::npos ||
      !parse_config_date(trim(value.substr(0, sep)), &start) ||
      !parse_config_date(trim(value.substr(sep + 2)), &end)) {
    errors.push_back(context + ": expected '<start>..<end>' dates, got '" +
                     value + "'");
    return;
  }
  period->start = start;
  period->end = end;
  period->anchor = end;
}

void assign_model_key(GbdtParams& params, const std::string& key,
                      Assigner& assign, const std::string& context,
                      std::vector<std::string>& errors) {
  if (key == "n_trees") assign.to(params.n_trees);
  else if (key == "learning_rate") assign.to(params.learning_rate);
  else if (key == "max_leaves") assign.to(params.max_leaves);
  else if (key == "max_depth") assign.to(params.max_depth);
  else if (key == "n_bins") assign.to(params.n_bins);
  else if (key == "lambda_l2") assign.to(params.lambda_l2);
  else if (key == "gamma_min_gain") assign.to(params.gamma_min_gain);
  else if (key == "min_child_hessian") assign.to(params.min_child_hessian);
  else if (key == "row_subsample") assign.to(params.row_subsample);
  else if (key == "col_subsample") assign.to(params.col_subsample);
  else if (key == "seed") assign.to(params.seed);
  else if (key == "growth") {
    std::string v;
    assign.to(v);
    if (v == "depth_wise") params.growth = GrowthStrategy::kDepthWise;
    else if (v == "leaf_wise") params.growth = GrowthStrategy::kLeafWise;
    else errors.push_back(context + ": growth must be depth_wise or leaf_wise");
  } else if (key == "base_score") {
    std::string v;
    assign.to(v);
    if (v == "prior_logodds") {
      params.base_score_mode = BaseScoreMode::kPriorLogodds;
    } else if (v == "zero") {
      params.base_score_mode = BaseScoreMode::kZero;
    } else {
      errors.push_back(context + ": base_score must be prior_logodds or zero");
    }
  } else {
    errors.push_back(context + ": unknown key");
  }
}

}  // namespace

PipelineConfig default_config() {
  PipelineConfig config;
  config.model_a.growth = GrowthStrategy::kDepthWise;
  config.model_b.growth = GrowthStrategy::kLeafWise;
  config.model_b.max_depth = 0;  // leaf-wise growth self-limits by leaves
  config.model_b.seed = config.model_a.seed + 1;
  return config;
}

std::vector<std::string> config_errors(const PipelineConfig& config) {
  std::vector<std::string> errors;

  if (config.source == DataSource::kCsv && config.data_dir.empty()) {
    errors.push_back("[data] dir is required when source = csv");
  }
  if (config.source == DataSource::kSynth) {
    if (config.synth_users < 1) {
      errors.push_back("[data] synth_users must be >= 1");
    }
    if (config.synth_months < 1) {
      errors.push_back("[data] synth_months must be >= 1");
    }
  }

  const auto check_period = [&](const TimePeriod& p) {
    try {
      p.validate();
    } catch (const ConfigError& e) {
      errors.push_back(std::string("[periods] ") + e.what());
    }
  };
  check_period(config.periods.train);
  check_period(config.periods.cv);
  check_period(config.periods.test);
  if (!(config.periods.train.end < config.periods.cv.start)) {
    errors.push_back("[periods] train must end before cv starts");
  }
  if (!(config.periods.cv.end < config.periods.test.start)) {
    errors.push_back("[periods] cv must end before test starts");
  }

  if (config.selection_epsilon < 0.0) {
    errors.push_back("[selection] epsilon must be >= 0");
  }
  if (!(config.correlation_threshold > 0.0 &&
        config.correlation_threshold <= 1.0)) {
    errors.push_back("[selection] correlation_threshold must be in (0, 1]");
  }
  if (config.selection_trial_trees < 0) {
    errors.push_back("[selection] trial_trees must be >= 0");
  }

  const auto check_model = [&](const GbdtParams& params, const char* name) {
    try {
      params.validate();
    } catch (const ConfigError& e) {
      errors.push_back(std::string("[model.") + name + "] " + e.what());
    }
  };
  check_model(config.model_a, "a");
  check_model(config.model_b, "b");

  if (config.weight_a < 0.0 || config.weight_b < 0.0) {
    errors.push_back("[ensemble] weights must be >= 0");
  }
  if (std::abs(config.weight_a + config.weight_b - 1.0) > 1e-9) {
    errors.push_back("[ensemble] weights must sum to 1");
  }
  if (config.out_dir.empty()) {
    errors.push_back("[run] out must not be empty");
  }
  return errors;
}

ConfigParseResult parse_config_text(const std::string& text) {
  ConfigParseResult result;
  result.config = default_config();
  PipelineConfig& config = result.config;
  RawConfig raw = scan_ini(text);
  result.errors = std::move(raw.errors);

  bool model_a_seed_set = false;
  bool model_b_seed_set = false;
  bool run_seed_set = false;

  for (const auto& [section, key, value] : raw.entries) {
    const std::string context = "[" + section + "] " + key;
    Assigner assign(context, value, result.errors);

    if (section == "data") {
      if (key == "source") {
        if (value == "synth") config.source = DataSource::kSynth;
        else if (value == "csv") config.source = DataSource::kCsv;
        else result.errors.push_back(context + ": must be synth or csv");
      } else if (key == "dir") assign.to(config.data_dir);
      else if (key == "synth_users") assign.to(config.synth_users);
      else if (key == "synth_months") assign.to(config.synth_months);
      else result.errors.push_back(context + ": unknown key");
    } else if (section == "periods") {
      if (key == "train") {
        parse_period(value, context, &config.periods.train, result.errors);
      } else if (key == "cv") {
        parse_period(value, context, &config.periods.cv, result.errors);
      } else if (key == "test") {
        parse_period(value, context, &config.periods.test, result.errors);
      } else if (key == "train_anchor" || key == "cv_anchor" ||
                 key == "test_anchor") {
        CalendarDate anchor;
        if (!parse_config_date(value, &anchor)) {
          result.errors.push_back(context + ": bad date '" + value + "'");
        } else if (key == "train_anchor") {
          config.periods.train.anchor = anchor;
        } else if (key == "cv_anchor") {
          config.periods.cv.anchor = anchor;
        } else {
          config.periods.test.anchor = anchor;
        }
      } else {
        result.errors.push_back(context + ": unknown key");
      }
    } else if (section == "features") {
      if (key == "catalog") assign.to(config.catalog_path);
      else result.errors.push_back(context + ": unknown key");
    } else if (section == "selection") {
      if (key == "enabled") assign.to(config.selection_enabled);
      else if (key == "epsilon") assign.to(config.selection_epsilon);
      else if (key == "correlation_threshold") {
        assign.to(config.correlation_threshold);
      } else if (key == "trial_trees") {
        assign.to(config.selection_trial_trees);
      } else {
        result.errors.push_back(context + ": unknown key");
      }
    } else if (section == "model.a" || section == "model.b") {
      GbdtParams& params =
          section == "model.a" ? config.model_a : config.model_b;
      if (key == "seed") {
        (section == "model.a" ? model_a_seed_set : model_b_seed_set) = true;
      }
      assign_model_key(params, key, assign, context, result.errors);
    } else if (section == "ensemble") {
      if (key == "weights") {
        const auto comma = value.find(',');
        bool ok = comma != std::string::npos;
        if (ok) {
          try {
            config.weight_a = std::stod(trim(value.substr(0, comma)));
            config.weight_b = std::stod(trim(value.substr(comma + 1)));
          } catch (const std::exception&) {
            ok = false;
          }
        }
        if (!ok) {
          result.errors.push_back(context +
                                  ": expected two comma-separated weights");
        }
      } else {
        result.errors.push_back(context + ": unknown key");
      }
    } else if (section == "run") {
      if (key == "seed") {
        assign.to(config.seed);
        run_seed_set = true;
      } else if (key == "out") {
        assign.to(config.out_dir);
      } else {
        result.errors.push_back(context + ": unknown key");
      }
    } else {
      result.errors.push_back("unknown section [" + section + "]");
    }
  }

  // The run seed flows into the boosters unless a model pinned its own.
  if (run_seed_set) {
    if (!model_a_seed_set) config.model_a.seed = config.seed;
    if (!model_b_seed_set) config.model_b.seed = config.seed + 1;
  }

  const auto semantic = config_errors(config);
  result.errors.insert(result.errors.end(), semantic.begin(), semantic.end());
  return result;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ConfigParseResult result = parse_config_text(buf.str());
  if (!result.errors.empty()) {
    std::string message = "config " + path + " is invalid:";
    for (const auto& e : result.errors) message += "\n  - " + e;
    throw ConfigError(message);
  }
  return result.config;
}

}  // namespace churnpipe
