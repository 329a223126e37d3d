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

#ifndef CHURNPIPE_FEATURE_MATRIX_HPP_
#define CHURNPIPE_FEATURE_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "churnpipe/records.hpp"

namespace churnpipe {

// The value stored wherever a feature could not be computed. The booster
// routes these down a learned default direction instead of treating them
// as zero.
inline constexpr double kMissingValue =
    std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Dense users x features table, row-major. Missing entries hold NaN;
// infinities are never stored (builders sanitize them to missing).
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<UserId> user_ids,
                std::vector<std::string> feature_names);

  std::size_t rows() const { return user_ids_.size(); }
  std::size_t cols() const { return feature_names_.size(); }

  const std::vector<UserId>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  double at(std::size_t row, std::size_t col) const {
    return values_[row * feature_names_.size() + col];
  }
  void set(std::size_t row, std::size_t col, double value) {
    values_[row * feature_names_.size() + col] = value;
  }
  const double* row_data(std::size_t row) const {
    return values_.data() + row * feature_names_.size();
  }
  const std::vector<double>& values() const { return values_; }

  // Index of a named column, or -1 when absent.
  int column_index(const std::string& name) const;

  // New matrix keeping only the named columns, in the given order.
  // Unknown names raise DataError.
  FeatureMatrix select_columns(const std::vector<std::string>& names) const;

  // Appends one column; `column` must have rows() entries and the name must
  // be new.
  void append_column(const std::string& name,
                     const std::vector<double>& column);

  // One column as a vector (rows() entries).
  std::vector<double> column(std::size_t col) const;

  // True when no entry is +/-inf. NaN is fine; it is the missing sentinel.
  bool all_finite_or_missing() const;

 private:
  std::vector<UserId> user_ids_;
  std::vector<std::string> feature_names_;
  std::vector<double> values_;  // rows x cols, row-major
};

// CSV form: header `user_id,<feature...>`, missing cells empty, values
// written with round-trip precision.
void write_matrix_csv(const FeatureMatrix& matrix, const std::string& path);
FeatureMatrix read_matrix_csv(const std::string& path);

// Compact binary cache with byte-exact value round-trip. Layout: "CHMX"
// magic, u32 version, u64 rows, u64 cols, length-prefixed user ids and
// feature names, then rows*cols little-endian doubles.
void write_matrix_binary(const FeatureMatrix& matrix,
                         const std::string& path);
FeatureMatrix read_matrix_binary(const std::string& path);

// Dispatches on extension: ".csv" -> CSV, anything else -> binary.
void write_matrix(const FeatureMatrix& matrix, const std::string& path);
FeatureMatrix read_matrix(const std::string& path);

}  // namespace churnpipe

#endif  // CHURNPIPE_FEATURE_MATRIX_HPP_
