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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cpsflow {

enum class ValueKind { Float64, Int64, Boolean, FloatList };

std::string_view to_string(ValueKind kind);
ValueKind value_kind_from_string(std::string_view name);

/// A typed vector of values. Exactly one value kind per column.
class Column {
 public:
  using Float64 = std::vector<double>;
  using Int64 = std::vector<std::int64_t>;
  using Boolean = std::vector<bool>;
  using FloatList = std::vector<std::vector<double>>;

  Column() : data_(Float64{}) {}
  /// Rejects NaN entries unless `allow_nan` is set.
  explicit Column(Float64 values, bool allow_nan = false);
  explicit Column(Int64 values) : data_(std::move(values)) {}
  explicit Column(Boolean values) : data_(std::move(values)) {}
  explicit Column(FloatList values, bool allow_nan = false);

  ValueKind kind() const noexcept { return static_cast<ValueKind>(data_.index()); }
  std::size_t size() const noexcept;
  bool is_numeric() const noexcept { return kind() != ValueKind::FloatList; }

  const Float64& float64() const;
  const Int64& int64() const;
  const Boolean& boolean() const;
  const FloatList& float_list() const;

  /// Numeric view as doubles; Int64 and Boolean are converted, lists are rejected.
  Float64 to_float64() const;

  Column slice(std::size_t begin, std::size_t end) const;
  Column take(std::span<const std::size_t> rows) const;
  Column concat(const Column& other) const;

  friend bool operator==(const Column& a, const Column& b) { return a.data_ == b.data_; }

 private:
  std::variant<Float64, Int64, Boolean, FloatList> data_;
};

struct Field {
  std::string name;
  ValueKind kind;

  friend bool operator==(const Field&, const Field&) = default;
};

using Schema = std::vector<Field>;

/// Immutable column-oriented table. Every operation returns a new Dataset.
class Dataset {
 public:
  using Entry = std::pair<std::string, Column>;

  Dataset() = default;
  explicit Dataset(std::vector<Entry> columns);
  /// Needed for column-free datasets, which still carry a row count.
  Dataset(std::vector<Entry> columns, std::size_t row_count);

  std::size_t row_count() const noexcept { return row_count_; }
  std::size_t column_count() const noexcept { return columns_.size(); }
  bool empty() const noexcept { return row_count_ == 0; }

  const std::vector<Entry>& columns() const noexcept { return columns_; }
  std::vector<std::string> names() const;
  Schema schema() const;

  bool has_column(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  const Column& column(std::string_view name) const;
  const Column& column(std::size_t index) const;
  const std::string& name(std::size_t index) const;

  /// Columns in the requested order; throws UnknownColumn.
  Dataset select(std::span<const std::string> names) const;
  Dataset select(std::initializer_list<std::string> names) const;
  Dataset slice_rows(std::size_t begin, std::size_t end) const;
  Dataset take_rows(std::span<const std::size_t> rows) const;
  Dataset with_column(std::string name, Column column) const;

  /// Row-wise concatenation; schemas must be equal.
  static Dataset concat_rows(const Dataset& top, const Dataset& bottom);

  /// Row `row` of the numeric columns as doubles.
  std::vector<double> row_float64(std::size_t row) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.row_count_ == b.row_count_ && a.columns_ == b.columns_;
  }

 private:
  std::vector<Entry> columns_;
  std::size_t row_count_ = 0;
};

Dataset select_columns(const Dataset& data, std::span<const std::string> names);

/// Chronological split: the first floor(fraction * rows) rows, then the rest.
std::pair<Dataset, Dataset> vertical_split(const Dataset& data, double fraction);

}  // namespace cpsflow
