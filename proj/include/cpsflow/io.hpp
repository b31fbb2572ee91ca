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

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cpsflow/dataset.hpp"

namespace cpsflow {

using Json = nlohmann::ordered_json;

struct CsvOptions {
  bool has_header = true;
  char delimiter = ',';
  /// Accept "nan"/"NaN" cells as quiet NaN.
  bool allow_nan = false;
};

/// Every cell must parse as a number; columns load as Float64. Without a
/// header, columns are named column_0, column_1, ...
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const CsvOptions& options = {});

/// Writes numeric columns with the shortest round-trippable representation.
void write_csv(const Dataset& data, const std::filesystem::path& path, const CsvOptions& options = {});
std::string format_csv(const Dataset& data, const CsvOptions& options = {});

/// Accepts either an array of flat records with identical keys or an object
/// of equal-length arrays. Integer-only columns load as Int64, mixed numeric
/// columns as Float64, booleans as Boolean and numeric arrays as lists.
Dataset load_json(const std::filesystem::path& path);
Dataset dataset_from_json(const Json& doc);

/// Column-wise object {"name": [...], ...}.
Json dataset_to_json(const Dataset& data);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace cpsflow
