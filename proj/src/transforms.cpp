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

#include "cpsflow/transforms.hpp"

#include <cmath>
#include <cstdint>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "transforms";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

class Select final : public Transform {
 public:
  explicit Select(std::vector<std::string> names) : names_(std::move(names)) {}

  std::string kind() const override { return "select"; }
  Dataset apply(const Dataset& data) const override { return data.select(names_); }
  Json to_json() const override { return Json{{"kind", kind()}, {"columns", names_}}; }

 private:
  std::vector<std::string> names_;
};

class Explode final : public Transform {
 public:
  explicit Explode(std::vector<std::string> names) : names_(std::move(names)) {}

  std::string kind() const override { return "explode"; }
  Json to_json() const override { return Json{{"kind", kind()}, {"columns", names_}}; }

  Dataset apply(const Dataset& data) const override {
    if (names_.empty()) return data;
    std::vector<const Column::FloatList*> lists;
    std::vector<bool> exploded(data.column_count(), false);
    for (const auto& n : names_) {
      const std::size_t idx = data.index_of(n);
      const Column& col = data.column(idx);
      if (col.kind() != ValueKind::FloatList) {
        fail(ErrorCode::NotAListColumn, "column '" + n + "' is not a list column");
      }
      lists.push_back(&col.float_list());
      exploded[idx] = true;
    }

    std::vector<std::size_t> source_rows;
    for (std::size_t r = 0; r < data.row_count(); ++r) {
      const std::size_t len = (*lists.front())[r].size();
      for (const auto* l : lists) {
        if ((*l)[r].size() != len) {
          fail(ErrorCode::RaggedListLengths, "RaggedListLengths(" + std::to_string(r) + ")");
        }
      }
      source_rows.insert(source_rows.end(), len, r);
    }

    std::vector<Dataset::Entry> out;
    out.reserve(data.column_count());
    for (std::size_t c = 0; c < data.column_count(); ++c) {
      const Column& col = data.column(c);
      if (!exploded[c]) {
        out.emplace_back(data.name(c), col.take(source_rows));
        continue;
      }
      Column::Float64 flat;
      flat.reserve(source_rows.size());
      for (const auto& items : col.float_list()) flat.insert(flat.end(), items.begin(), items.end());
      out.emplace_back(data.name(c), Column(std::move(flat), true));
    }
    return Dataset(std::move(out), source_rows.size());
  }

 private:
  std::vector<std::string> names_;
};

class SlidingWindow final : public Transform {
 public:
  explicit SlidingWindow(std::size_t window) : window_(window) {
    if (window_ == 0) fail(ErrorCode::InvalidArgument, "window size must be at least 1");
  }

  std::string kind() const override { return "sliding_window"; }
  Json to_json() const override { return Json{{"kind", kind()}, {"window_size", window_}}; }

  Dataset apply(const Dataset& data) const override {
    if (data.row_count() < window_) {
      fail(ErrorCode::WindowLargerThanData, "window of " + std::to_string(window_) + " exceeds " +
                                                std::to_string(data.row_count()) + " rows");
    }
    const std::size_t rows = data.row_count() - window_ + 1;
    std::vector<Dataset::Entry> out;
    out.reserve(window_ * data.column_count());
    for (std::size_t step = 0; step < window_; ++step) {
      for (std::size_t c = 0; c < data.column_count(); ++c) {
        out.emplace_back(data.name(c) + "_" + std::to_string(step), data.column(c).slice(step, step + rows));
      }
    }
    return Dataset(std::move(out), rows);
  }

 private:
  std::size_t window_;
};

std::vector<std::string> string_list(const Json& spec, const char* key) {
  if (!spec.contains(key) || !spec.at(key).is_array()) {
    fail(ErrorCode::ConfigError, std::string("transform field '") + key + "' must be a list of column names");
  }
  std::vector<std::string> out;
  for (const auto& v : spec.at(key)) {
    if (!v.is_string()) fail(ErrorCode::ConfigError, std::string("transform field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

TransformPtr Transform::fit(const Dataset&) const { return nullptr; }

TransformPtr select(std::vector<std::string> names) { return std::make_shared<Select>(std::move(names)); }

TransformPtr explode(std::vector<std::string> names) { return std::make_shared<Explode>(std::move(names)); }

TransformPtr sliding_window(std::size_t window_size) { return std::make_shared<SlidingWindow>(window_size); }

TransformPtr standardize(std::vector<std::string> names) {
  return std::make_shared<Standardize>(std::move(names));
}

Standardize::Standardize(std::vector<std::string> names) : names_(std::move(names)) {}

Standardize::Standardize(std::vector<ColumnStats> fitted) {
  for (const auto& s : fitted) names_.push_back(s.name);
  stats_ = std::move(fitted);
}

TransformPtr Standardize::fit(const Dataset& data) const {
  if (data.row_count() == 0) fail(ErrorCode::EmptyDataset, "cannot fit standardize on an empty dataset");
  std::vector<ColumnStats> stats;
  stats.reserve(names_.size());
  const double n = static_cast<double>(data.row_count());
  for (const auto& name : names_) {
    const Column& col = data.column(name);
    if (!col.is_numeric()) fail(ErrorCode::TypeMismatch, "column '" + name + "' is not numeric");
    const auto values = col.to_float64();
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double stddev = std::sqrt(sq / n);
    stats.push_back({name, mean, stddev, stddev < kConstantColumnThreshold});
  }
  return std::make_shared<Standardize>(std::move(stats));
}

Dataset Standardize::apply(const Dataset& data) const {
  if (!stats_) fail(ErrorCode::NotFitted, "standardize applied before fitting");
  Dataset out = data;
  for (const auto& s : *stats_) {
    const Column& col = data.column(s.name);
    if (!col.is_numeric()) fail(ErrorCode::TypeMismatch, "column '" + s.name + "' is not numeric");
    auto values = col.to_float64();
    for (double& v : values) v = s.constant ? 0.0 : (v - s.mean) / s.stddev;
    out = out.with_column(s.name, Column(std::move(values), true));
  }
  return out;
}

Json Standardize::to_json() const {
  Json out{{"kind", kind()}, {"columns", names_}};
  if (stats_) {
    Json stats = Json::array();
    for (const auto& s : *stats_) {
      stats.push_back({{"name", s.name}, {"mean", s.mean}, {"stddev", s.stddev}, {"constant", s.constant}});
    }
    out["stats"] = std::move(stats);
  }
  return out;
}

std::shared_ptr<const Standardize> standardize_fit(std::vector<std::string> names, const Dataset& data) {
  return std::static_pointer_cast<const Standardize>(Standardize(std::move(names)).fit(data));
}

Dataset standardize_apply(const Transform& fitted, const Dataset& data) { return fitted.apply(data); }

TransformPtr transform_from_json(const Json& spec) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    fail(ErrorCode::ConfigError, "transform needs a string 'kind'");
  }
  const auto kind = spec.at("kind").get<std::string>();
  if (kind == "select") return select(string_list(spec, "columns"));
  if (kind == "explode") return explode(string_list(spec, "columns"));
  if (kind == "sliding_window") {
    if (!spec.contains("window_size") || !spec.at("window_size").is_number_integer() ||
        spec.at("window_size").get<std::int64_t>() <= 0) {
      fail(ErrorCode::ConfigError, "sliding_window needs a positive integer 'window_size'");
    }
    return sliding_window(spec.at("window_size").get<std::size_t>());
  }
  if (kind == "standardize") {
    if (spec.contains("stats")) {
      std::vector<ColumnStats> stats;
      try {
        for (const auto& s : spec.at("stats")) {
          stats.push_back({s.at("name").get<std::string>(), s.at("mean").get<double>(), s.at("stddev").get<double>(),
                           s.at("constant").get<bool>()});
        }
      } catch (const Json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("malformed standardize stats: ") + e.what());
      }
      return std::make_shared<Standardize>(std::move(stats));
    }
    return standardize(string_list(spec, "columns"));
  }
  fail(ErrorCode::ConfigError, "unknown transform kind '" + kind + "'");
}

TransformChain TransformChain::then(TransformPtr next) const {
  auto items = items_;
  items.push_back(std::move(next));
  return TransformChain(std::move(items));
}

TransformChain TransformChain::then(const TransformChain& next) const {
  auto items = items_;
  items.insert(items.end(), next.items_.begin(), next.items_.end());
  return TransformChain(std::move(items));
}

Dataset TransformChain::apply(const Dataset& data) const {
  Dataset current = data;
  for (const auto& t : items_) current = t->apply(current);
  return current;
}

TransformChain TransformChain::fit(const Dataset& data) const {
  std::vector<TransformPtr> fitted;
  fitted.reserve(items_.size());
  Dataset current = data;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    TransformPtr t = items_[i];
    if (t->is_adaptive() && !t->is_fitted()) t = t->fit(current);
    if (i + 1 < items_.size()) current = t->apply(current);
    fitted.push_back(std::move(t));
  }
  return TransformChain(std::move(fitted));
}

bool TransformChain::is_fitted() const {
  for (const auto& t : items_) {
    if (!t->is_fitted()) return false;
  }
  return true;
}

Json TransformChain::to_json() const {
  Json out = Json::array();
  for (const auto& t : items_) out.push_back(t->to_json());
  return out;
}

Dataset chain_apply(const TransformChain& chain, const Dataset& data) { return chain.apply(data); }

}  // namespace cpsflow
