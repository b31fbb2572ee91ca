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

#include "cpsflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "data_core";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Splits CSV text into records of raw cells. Quoted fields may contain the
// delimiter, doubled quotes and line breaks.
std::vector<std::vector<std::string>> split_records(std::string_view text, char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool any_content = false;

  auto end_record = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    const bool blank = record.size() == 1 && trim(record.front()).empty() && !any_content;
    if (!blank) records.push_back(std::move(record));
    record.clear();
    any_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
      any_content = true;
    } else if (c == delimiter) {
      record.push_back(std::move(cell));
      cell.clear();
      any_content = true;
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // tolerated as part of CRLF line endings
    } else {
      cell.push_back(c);
    }
  }
  if (in_quotes) fail(ErrorCode::ParseError, "unterminated quoted field");
  if (!cell.empty() || !record.empty() || any_content) end_record();
  return records;
}

std::string quote_if_needed(const std::string& field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Column column_from_json_values(const std::string& name, const std::vector<const Json*>& values) {
  if (values.empty()) return Column(Column::Float64{});
  bool all_bool = true;
  bool all_int = true;
  bool all_number = true;
  bool all_array = true;
  for (const auto* v : values) {
    all_bool = all_bool && v->is_boolean();
    all_int = all_int && v->is_number_integer();
    all_number = all_number && v->is_number();
    all_array = all_array && v->is_array();
  }
  if (all_bool) {
    Column::Boolean out;
    out.reserve(values.size());
    for (const auto* v : values) out.push_back(v->get<bool>());
    return Column(std::move(out));
  }
  if (all_int) {
    Column::Int64 out;
    out.reserve(values.size());
    for (const auto* v : values) out.push_back(v->get<std::int64_t>());
    return Column(std::move(out));
  }
  if (all_number) {
    Column::Float64 out;
    out.reserve(values.size());
    for (const auto* v : values) out.push_back(v->get<double>());
    return Column(std::move(out));
  }
  if (all_array) {
    Column::FloatList out;
    out.reserve(values.size());
    for (std::size_t row = 0; row < values.size(); ++row) {
      std::vector<double> items;
      for (const auto& item : *values[row]) {
        if (!item.is_number()) {
          fail(ErrorCode::ParseError, "non-numeric list element in column '" + name + "' at row " + std::to_string(row));
        }
        items.push_back(item.get<double>());
      }
      out.push_back(std::move(items));
    }
    return Column(std::move(out));
  }
  fail(ErrorCode::ParseError, "column '" + name + "' mixes value types or holds unsupported values");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorCode::FileNotFound, "file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) fail(ErrorCode::InvalidArgument, "cannot format double");
  return std::string(buf, ptr);
}

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
  auto records = split_records(text, options.delimiter);
  if (records.empty()) fail(ErrorCode::EmptyFile, "CSV input is empty");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (options.has_header) {
    for (const auto& h : records.front()) names.emplace_back(trim(h));
    first_data = 1;
  } else {
    for (std::size_t i = 0; i < records.front().size(); ++i) names.push_back("column_" + std::to_string(i));
  }

  const std::size_t width = names.size();
  std::vector<Column::Float64> values(width);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t row = r - first_data;
    if (rec.size() != width) {
      fail(ErrorCode::RaggedRows, "row " + std::to_string(row) + " has " + std::to_string(rec.size()) +
                                      " fields, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_number(rec[c], v)) {
        fail(ErrorCode::ParseError, "ParseError at row " + std::to_string(row) + ", column '" + names[c] +
                                        "': '" + rec[c] + "' is not numeric");
      }
      if (std::isnan(v) && !options.allow_nan) {
        fail(ErrorCode::ParseError, "ParseError at row " + std::to_string(row) + ", column '" + names[c] +
                                        "': NaN not permitted");
      }
      values[c].push_back(v);
    }
  }

  std::vector<Dataset::Entry> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    columns.emplace_back(names[c], Column(std::move(values[c]), options.allow_nan));
  }
  return Dataset(std::move(columns), records.size() - first_data);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  return parse_csv(read_file(path), options);
}

std::string format_csv(const Dataset& data, const CsvOptions& options) {
  std::string out;
  const std::string delim(1, options.delimiter);
  if (options.has_header) {
    for (std::size_t c = 0; c < data.column_count(); ++c) {
      if (c) out += delim;
      out += quote_if_needed(data.name(c), options.delimiter);
    }
    out += '\n';
  }
  std::vector<Column::Float64> cols;
  cols.reserve(data.column_count());
  for (std::size_t c = 0; c < data.column_count(); ++c) cols.push_back(data.column(c).to_float64());
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out += delim;
      out += format_double(cols[c][r]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const CsvOptions& options) {
  write_file(path, format_csv(data, options));
}

Dataset dataset_from_json(const Json& doc) {
  std::vector<Dataset::Entry> columns;
  if (doc.is_array()) {
    if (doc.empty()) return Dataset{};
    std::vector<std::string> keys;
    if (!doc.front().is_object()) fail(ErrorCode::ParseError, "record 0 is not an object");
    for (const auto& item : doc.front().items()) keys.push_back(item.key());
    std::vector<std::vector<const Json*>> values(keys.size());
    for (std::size_t r = 0; r < doc.size(); ++r) {
      const auto& rec = doc[r];
      if (!rec.is_object()) fail(ErrorCode::ParseError, "record " + std::to_string(r) + " is not an object");
      if (rec.size() != keys.size()) {
        fail(ErrorCode::InconsistentKeys, "record " + std::to_string(r) + " has a different key set");
      }
      for (std::size_t k = 0; k < keys.size(); ++k) {
        auto it = rec.find(keys[k]);
        if (it == rec.end()) {
          fail(ErrorCode::InconsistentKeys, "record " + std::to_string(r) + " lacks key '" + keys[k] + "'");
        }
        values[k].push_back(&*it);
      }
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
      columns.emplace_back(keys[k], column_from_json_values(keys[k], values[k]));
    }
    return Dataset(std::move(columns), doc.size());
  }
  if (doc.is_object()) {
    for (const auto& item : doc.items()) {
      if (!item.value().is_array()) fail(ErrorCode::ParseError, "column '" + item.key() + "' is not an array");
      std::vector<const Json*> values;
      values.reserve(item.value().size());
      for (const auto& v : item.value()) values.push_back(&v);
      columns.emplace_back(item.key(), column_from_json_values(item.key(), values));
    }
    return Dataset(std::move(columns));
  }
  fail(ErrorCode::ParseError, "expected an array of records or an object of columns");
}

Dataset load_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return dataset_from_json(doc);
}

Json dataset_to_json(const Dataset& data) {
  Json out = Json::object();
  for (const auto& [name, col] : data.columns()) {
    switch (col.kind()) {
      case ValueKind::Float64: out[name] = col.float64(); break;
      case ValueKind::Int64: out[name] = col.int64(); break;
      case ValueKind::Boolean: out[name] = col.boolean(); break;
      case ValueKind::FloatList: out[name] = col.float_list(); break;
    }
  }
  return out;
}

}  // namespace cpsflow
