// Copyright 2026 The cpsflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cpsflow/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "data_core";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

void reject_nan(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) {
      fail(ErrorCode::NonFiniteValue, "NaN at row " + std::to_string(i));
    }
  }
}

template <typename Vec>
Vec slice_vec(const Vec& v, std::size_t begin, std::size_t end) {
  return Vec(v.begin() + static_cast<std::ptrdiff_t>(begin),
             v.begin() + static_cast<std::ptrdiff_t>(end));
}

template <typename Vec>
Vec take_vec(const Vec& v, std::span<const std::size_t> rows) {
  Vec out;
  out.reserve(rows.size());
  for (auto r : rows) {
    if (r >= v.size()) fail(ErrorCode::InvalidArgument, "row index out of range");
    out.push_back(v[r]);
  }
  return out;
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Float64: return "float64";
    case ValueKind::Int64: return "int64";
    case ValueKind::Boolean: return "bool";
    case ValueKind::FloatList: return "list[float64]";
  }
  return "unknown";
}

ValueKind value_kind_from_string(std::string_view name) {
  if (name == "float64") return ValueKind::Float64;
  if (name == "int64") return ValueKind::Int64;
  if (name == "bool") return ValueKind::Boolean;
  if (name == "list[float64]") return ValueKind::FloatList;
  fail(ErrorCode::ParseError, "unknown value kind '" + std::string(name) + "'");
}

Column::Column(Float64 values, bool allow_nan) : data_(std::move(values)) {
  if (!allow_nan) reject_nan(std::get<Float64>(data_));
}

Column::Column(FloatList values, bool allow_nan) : data_(std::move(values)) {
  if (!allow_nan) {
    for (const auto& row : std::get<FloatList>(data_)) reject_nan(row);
  }
}

std::size_t Column::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

const Column::Float64& Column::float64() const {
  if (const auto* v = std::get_if<Float64>(&data_)) return *v;
  fail(ErrorCode::TypeMismatch, "column is " + std::string(to_string(kind())) + ", expected float64");
}

const Column::Int64& Column::int64() const {
  if (const auto* v = std::get_if<Int64>(&data_)) return *v;
  fail(ErrorCode::TypeMismatch, "column is " + std::string(to_string(kind())) + ", expected int64");
}

const Column::Boolean& Column::boolean() const {
  if (const auto* v = std::get_if<Boolean>(&data_)) return *v;
  fail(ErrorCode::TypeMismatch, "column is " + std::string(to_string(kind())) + ", expected bool");
}

const Column::FloatList& Column::float_list() const {
  if (const auto* v = std::get_if<FloatList>(&data_)) return *v;
  fail(ErrorCode::NotAListColumn, "column is " + std::string(to_string(kind())) + ", expected list[float64]");
}

Column::Float64 Column::to_float64() const {
  switch (kind()) {
    case ValueKind::Float64:
      return std::get<Float64>(data_);
    case ValueKind::Int64: {
      const auto& v = std::get<Int64>(data_);
      return Float64(v.begin(), v.end());
    }
    case ValueKind::Boolean: {
      const auto& v = std::get<Boolean>(data_);
      Float64 out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] ? 1.0 : 0.0;
      return out;
    }
    case ValueKind::FloatList:
      break;
  }
  fail(ErrorCode::TypeMismatch, "list column has no scalar numeric view");
}

Column Column::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) fail(ErrorCode::InvalidArgument, "slice out of range");
  Column out;
  out.data_ = std::visit(
      [&](const auto& v) -> decltype(data_) { return slice_vec(v, begin, end); }, data_);
  return out;
}

Column Column::take(std::span<const std::size_t> rows) const {
  Column out;
  out.data_ =
      std::visit([&](const auto& v) -> decltype(data_) { return take_vec(v, rows); }, data_);
  return out;
}

Column Column::concat(const Column& other) const {
  if (kind() != other.kind()) fail(ErrorCode::TypeMismatch, "cannot concatenate columns of different kinds");
  Column out = *this;
  std::visit(
      [&](auto& dst) {
        using V = std::decay_t<decltype(dst)>;
        const auto& src = std::get<V>(other.data_);
        dst.insert(dst.end(), src.begin(), src.end());
      },
      out.data_);
  return out;
}

Dataset::Dataset(std::vector<Entry> columns)
    : Dataset(std::move(columns), 0) {}

Dataset::Dataset(std::vector<Entry> columns, std::size_t row_count)
    : columns_(std::move(columns)), row_count_(row_count) {
  if (!columns_.empty()) row_count_ = columns_.front().second.size();
  std::unordered_set<std::string_view> seen;
  for (const auto& [name, col] : columns_) {
    if (!seen.insert(name).second) fail(ErrorCode::DuplicateColumn, "duplicate column '" + name + "'");
    if (col.size() != row_count_) {
      fail(ErrorCode::LengthMismatch, "column '" + name + "' has " + std::to_string(col.size()) +
                                          " rows, expected " + std::to_string(row_count_));
    }
  }
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& entry : columns_) out.push_back(entry.first);
  return out;
}

Schema Dataset::schema() const {
  Schema out;
  out.reserve(columns_.size());
  for (const auto& [name, col] : columns_) out.push_back({name, col.kind()});
  return out;
}

bool Dataset::has_column(std::string_view name) const {
  for (const auto& entry : columns_) {
    if (entry.first == name) return true;
  }
  return false;
}

std::size_t Dataset::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].first == name) return i;
  }
  fail(ErrorCode::UnknownColumn, "unknown column '" + std::string(name) + "'");
}

const Column& Dataset::column(std::string_view name) const { return columns_[index_of(name)].second; }

const Column& Dataset::column(std::size_t index) const {
  if (index >= columns_.size()) fail(ErrorCode::InvalidArgument, "column index out of range");
  return columns_[index].second;
}

const std::string& Dataset::name(std::size_t index) const {
  if (index >= columns_.size()) fail(ErrorCode::InvalidArgument, "column index out of range");
  return columns_[index].first;
}

Dataset Dataset::select(std::span<const std::string> names) const {
  std::vector<Entry> out;
  out.reserve(names.size());
  for (const auto& n : names) out.emplace_back(n, column(n));
  return Dataset(std::move(out), row_count_);
}

Dataset Dataset::select(std::initializer_list<std::string> names) const {
  return select(std::span<const std::string>(names.begin(), names.size()));
}

Dataset Dataset::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > row_count_) fail(ErrorCode::InvalidArgument, "row slice out of range");
  std::vector<Entry> out;
  out.reserve(columns_.size());
  for (const auto& [name, col] : columns_) out.emplace_back(name, col.slice(begin, end));
  return Dataset(std::move(out), end - begin);
}

Dataset Dataset::take_rows(std::span<const std::size_t> rows) const {
  std::vector<Entry> out;
  out.reserve(columns_.size());
  for (const auto& [name, col] : columns_) out.emplace_back(name, col.take(rows));
  return Dataset(std::move(out), rows.size());
}

Dataset Dataset::with_column(std::string name, Column column) const {
  std::vector<Entry> out = columns_;
  bool replaced = false;
  for (auto& entry : out) {
    if (entry.first == name) {
      entry.second = column;
      replaced = true;
    }
  }
  if (!replaced) out.emplace_back(std::move(name), std::move(column));
  return Dataset(std::move(out), row_count_);
}

Dataset Dataset::concat_rows(const Dataset& top, const Dataset& bottom) {
  if (top.schema() != bottom.schema()) fail(ErrorCode::SchemaMismatch, "cannot concatenate datasets with different schemas");
  std::vector<Entry> out;
  out.reserve(top.columns_.size());
  for (std::size_t i = 0; i < top.columns_.size(); ++i) {
    out.emplace_back(top.columns_[i].first, top.columns_[i].second.concat(bottom.columns_[i].second));
  }
  return Dataset(std::move(out), top.row_count_ + bottom.row_count_);
}

std::vector<double> Dataset::row_float64(std::size_t row) const {
  if (row >= row_count_) fail(ErrorCode::InvalidArgument, "row index out of range");
  std::vector<double> out;
  out.reserve(columns_.size());
  for (const auto& [name, col] : columns_) {
    switch (col.kind()) {
      case ValueKind::Float64: out.push_back(col.float64()[row]); break;
      case ValueKind::Int64: out.push_back(static_cast<double>(col.int64()[row])); break;
      case ValueKind::Boolean: out.push_back(col.boolean()[row] ? 1.0 : 0.0); break;
      case ValueKind::FloatList:
        fail(ErrorCode::TypeMismatch, "column '" + name + "' is a list column");
    }
  }
  return out;
}

Dataset select_columns(const Dataset& data, std::span<const std::string> names) {
  return data.select(names);
}

std::pair<Dataset, Dataset> vertical_split(const Dataset& data, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    fail(ErrorCode::InvalidFraction, "split fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  const std::size_t n = data.row_count();
  if (n < 2) fail(ErrorCode::TooFewRows, "split needs at least 2 rows, got " + std::to_string(n));
  const auto head = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  return {data.slice_rows(0, head), data.slice_rows(head, n)};
}

}  // namespace cpsflow
