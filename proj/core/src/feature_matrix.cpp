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

#include "churnpipe/feature_matrix.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "churnpipe/csv.hpp"
#include "churnpipe/error.hpp"

namespace churnpipe {
namespace {

constexpr char kMagic[4] = {'C', 'H', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

void put_string(std::ofstream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw DataError("truncated matrix cache: " + path);
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) {
    throw DataError("truncated matrix cache: " + path);
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::string get_string(std::ifstream& in, const std::string& path) {
  const std::uint32_t n = get_u32(in, path);
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) {
    throw DataError("truncated matrix cache: " + path);
  }
  return s;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::vector<UserId> user_ids,
                             std::vector<std::string> feature_names)
    : user_ids_(std::move(user_ids)),
      feature_names_(std::move(feature_names)),
      values_(user_ids_.size() * feature_names_.size(), kMissingValue) {}

int FeatureMatrix::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    if (feature_names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

FeatureMatrix FeatureMatrix::select_columns(
    const std::vector<std::string>& names) const {
  std::vector<int> src_cols;
  src_cols.reserve(names.size());
  for (const auto& name : names) {
    const int idx = column_index(name);
    if (idx < 0) throw DataError("matrix has no column named '" + name + "'");
    src_cols.push_back(idx);
  }
  FeatureMatrix out(user_ids_, names);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      out.set(r, c, at(r, static_cast<std::size_t>(src_cols[c])));
    }
  }
  return out;
}

void FeatureMatrix::append_column(const std::string& name,
                                  const std::vector<double>& column) {
  if (column.size() != rows()) {
    throw DataError("appended column '" + name + "' has " +
                    std::to_string(column.size()) + " values for " +
                    std::to_string(rows()) + " rows");
  }
  if (column_index(name) >= 0) {
    throw DataError("matrix already has a column named '" + name + "'");
  }
  const std::size_t old_cols = cols();
  std::vector<double> next((old_cols + 1) * rows());
  for (std::size_t r = 0; r < rows(); ++r) {
    std::memcpy(next.data() + r * (old_cols + 1), values_.data() + r * old_cols,
                old_cols * sizeof(double));
    next[r * (old_cols + 1) + old_cols] = column[r];
  }
  feature_names_.push_back(name);
  values_ = std::move(next);
}

std::vector<double> FeatureMatrix::column(std::size_t col) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
  return out;
}

bool FeatureMatrix::all_finite_or_missing() const {
  for (const double v : values_) {
    if (std::isinf(v)) return false;
  }
  return true;
}

void write_matrix_csv(const FeatureMatrix& matrix, const std::string& path) {
  std::vector<std::string> header;
  header.reserve(matrix.cols() + 1);
  header.push_back("user_id");
  for (const auto& name : matrix.feature_names()) header.push_back(name);
  CsvWriter writer(path, header);
  std::vector<std::string> row(matrix.cols() + 1);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    row[0] = matrix.user_ids()[r];
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      row[c + 1] = format_double(matrix.at(r, c));
    }
    writer.write_row(row);
  }
}

FeatureMatrix read_matrix_csv(const std::string& path) {
  CsvReader reader(path);
  const auto& header = reader.header();
  if (header.empty() || header[0] != "user_id") {
    throw DataError("matrix CSV must start with a user_id column: " + path);
  }
  std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<UserId> ids;
  std::vector<std::vector<double>> data;
  while (auto row = reader.next_row()) {
    ids.push_back((*row)[0]);
    std::vector<double> values(names.size(), kMissingValue);
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::string& cell = (*row)[c + 1];
      if (!cell.empty()) {
        try {
          values[c] = std::stod(cell);
        } catch (const std::exception&) {
          throw DataError("bad numeric cell '" + cell + "' in " + path);
        }
      }
    }
    data.push_back(std::move(values));
  }
  FeatureMatrix matrix(std::move(ids), std::move(names));
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      matrix.set(r, c, data[r][c]);
    }
  }
  return matrix;
}

void write_matrix_binary(const FeatureMatrix& matrix,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, matrix.rows());
  put_u64(out, matrix.cols());
  for (const auto& id : matrix.user_ids()) put_string(out, id);
  for (const auto& name : matrix.feature_names()) put_string(out, name);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      const double v = matrix.at(r, c);
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      put_u64(out, bits);
    }
  }
  if (!out) throw DataError("failed writing matrix cache: " + path);
}

FeatureMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open matrix cache: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a matrix cache (bad magic): " + path);
  }
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion) {
    throw DataError("unsupported matrix cache version " +
                    std::to_string(version) + ": " + path);
  }
  const std::uint64_t n_rows = get_u64(in, path);
  const std::uint64_t n_cols = get_u64(in, path);
  std::vector<UserId> ids;
  ids.reserve(n_rows);
  for (std::uint64_t i = 0; i < n_rows; ++i) ids.push_back(get_string(in, path));
  std::vector<std::string> names;
  names.reserve(n_cols);
  for (std::uint64_t i = 0; i < n_cols; ++i) {
    names.push_back(get_string(in, path));
  }
  FeatureMatrix matrix(std::move(ids), std::move(names));
  for (std::uint64_t r = 0; r < n_rows; ++r) {
    for (std::uint64_t c = 0; c < n_cols; ++c) {
      const std::uint64_t bits = get_u64(in, path);
      double v;
      std::memcpy(&v, &bits, sizeof(v));
      matrix.set(r, c, v);
    }
  }
  return matrix;
}

namespace {
bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

void write_matrix(const FeatureMatrix& matrix, const std::string& path) {
  if (has_suffix(path, ".csv")) {
    write_matrix_csv(matrix, path);
  } else {
    write_matrix_binary(matrix, path);
  }
}

FeatureMatrix read_matrix(const std::string& path) {
  if (has_suffix(path, ".csv")) return read_matrix_csv(path);
  return read_matrix_binary(path);
}

}  // namespace churnpipe
