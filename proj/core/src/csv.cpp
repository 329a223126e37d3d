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

#include "churnpipe/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "churnpipe/error.hpp"

namespace churnpipe {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

CsvReader::CsvReader(const std::string& path) : in_(path) {
  if (!in_) {
    throw DataError("cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(in_, line)) {
    throw DataError("empty file, expected a header row: " + path);
  }
  header_ = split_csv_line(line);
}

int CsvReader::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::optional<std::vector<std::string>> CsvReader::next_row() {
  std::string line;
  while (std::getline(in_, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    fields.resize(std::max(fields.size(), header_.size()));
    ++rows_read_;
    return fields;
  }
  return std::nullopt;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path), n_cols_(header.size()) {
  if (!out_) {
    throw DataError("cannot create file: " + path);
  }
  write_row(header);
  n_cols_ = header.size();
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  if (fields.size() != n_cols_) {
    throw DataError("csv row width " + std::to_string(fields.size()) +
                    " does not match header width " + std::to_string(n_cols_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put(',');
    const std::string& field = fields[i];
    if (field.find_first_of(",\"\n") == std::string::npos) {
      out_ << field;
    } else {
      out_.put('"');
      for (const char c : field) {
        if (c == '"') out_.put('"');
        out_.put(c);
      }
      out_.put('"');
    }
  }
  out_.put('\n');
}

void CsvWriter::close() {
  out_.close();
  if (!out_) {
    throw DataError("failed to flush csv output");
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  // Shortest round-trip representation.
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

}  // namespace churnpipe
