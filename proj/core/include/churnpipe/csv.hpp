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

#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace churnpipe {

/// Splits one CSV line into fields. Handles double-quoted fields with
/// embedded commas and doubled quotes; no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line);

/// Header-first CSV reader over comma-delimited UTF-8 text.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  /// Index of `name` in the header, or -1 when absent.
  int column_index(const std::string& name) const;

  /// Reads the next data row. Short rows are padded with empty fields so
  /// callers can index by header position unconditionally.
  std::optional<std::vector<std::string>> next_row();

  std::size_t rows_read() const { return rows_read_; }

 private:
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t rows_read_ = 0;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::size_t n_cols_;
};

/// Shortest decimal form that parses back to the same double. Integral
/// values render without a fraction part ("42" not "42.0").
std::string format_double(double v);

}  // namespace churnpipe
