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

#include "cpsflow/models.hpp"

#include <algorithm>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "learners_models";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

std::string schema_names(const Schema& schema) {
  std::string out = "[";
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) out += ", ";
    out += schema[i].name;
  }
  return out + "]";
}

}  // namespace

Model::Model(Schema input_schema, Schema output_schema)
    : input_schema_(std::move(input_schema)), output_schema_(std::move(output_schema)) {
  if (output_schema_.size() != 1) fail(ErrorCode::ShapeMismatch, "models predict exactly one output column");
}

std::vector<std::vector<double>> Model::checked_features(const Dataset& inputs) const {
  if (inputs.column_count() != input_schema_.size()) {
    fail(ErrorCode::SchemaMismatch, "expected " + std::to_string(input_schema_.size()) + " input columns " +
                                        schema_names(input_schema_) + ", got " +
                                        std::to_string(inputs.column_count()));
  }
  std::vector<std::vector<double>> features;
  features.reserve(input_schema_.size());
  for (std::size_t c = 0; c < input_schema_.size(); ++c) {
    if (inputs.name(c) != input_schema_[c].name) {
      fail(ErrorCode::SchemaMismatch, "input column " + std::to_string(c) + " is '" + inputs.name(c) +
                                          "', expected '" + input_schema_[c].name + "'");
    }
    if (!inputs.column(c).is_numeric()) {
      fail(ErrorCode::SchemaMismatch, "input column '" + inputs.name(c) + "' is not numeric");
    }
    features.push_back(inputs.column(c).to_float64());
  }
  return features;
}

Dataset Model::predict(const Dataset& inputs) const {
  const auto features = checked_features(inputs);
  auto values = predict_columns(features, inputs.row_count());
  return Dataset({{output_schema_.front().name, Column(std::move(values), true)}}, inputs.row_count());
}

Json Model::to_document() const {
  return Json{{"format_version", kModelFormatVersion},
              {"kind", kind()},
              {"input_schema", schema_to_json(input_schema_)},
              {"output_schema", schema_to_json(output_schema_)},
              {"params", params()}};
}

Dataset predict(const Model& model, const Dataset& inputs) { return model.predict(inputs); }

ConstantModel::ConstantModel(Schema input_schema, Schema output_schema, double value)
    : Model(std::move(input_schema), std::move(output_schema)), value_(value) {}

Json ConstantModel::params() const { return Json{{"value", value_}}; }

std::vector<double> ConstantModel::predict_columns(const std::vector<std::vector<double>>&,
                                                   std::size_t rows) const {
  return std::vector<double>(rows, value_);
}

LinearModel::LinearModel(Schema input_schema, Schema output_schema, std::vector<double> weights, double intercept)
    : Model(std::move(input_schema), std::move(output_schema)), weights_(std::move(weights)), intercept_(intercept) {
  if (weights_.size() != this->input_schema().size()) {
    fail(ErrorCode::ShapeMismatch, "linear model has " + std::to_string(weights_.size()) + " weights for " +
                                       std::to_string(this->input_schema().size()) + " inputs");
  }
}

Json LinearModel::params() const { return Json{{"weights", weights_}, {"intercept", intercept_}}; }

std::vector<double> LinearModel::predict_columns(const std::vector<std::vector<double>>& features,
                                                 std::size_t rows) const {
  std::vector<double> out(rows, intercept_);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = intercept_;
    for (std::size_t c = 0; c < weights_.size(); ++c) acc += weights_[c] * features[c][r];
    out[r] = acc;
  }
  return out;
}

RegressionTreeModel::RegressionTreeModel(Schema input_schema, Schema output_schema, std::vector<TreeNode> nodes)
    : Model(std::move(input_schema), std::move(output_schema)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) fail(ErrorCode::InvalidArgument, "regression tree has no nodes");
  const auto n = static_cast<std::int32_t>(nodes_.size());
  const auto features = static_cast<std::int32_t>(this->input_schema().size());
  // Children always follow their parent, which also rules out cycles.
  for (std::int32_t i = 0; i < n; ++i) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf()) continue;
    if (node.feature < 0 || node.feature >= features || node.left <= i || node.left >= n || node.right <= i ||
        node.right >= n) {
      fail(ErrorCode::InvalidArgument, "regression tree node references are out of range");
    }
  }
}

std::size_t RegressionTreeModel::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, d] = stack.back();
    stack.pop_back();
    const auto& node = nodes_[static_cast<std::size_t>(idx)];
    best = std::max(best, d);
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return best;
}

std::size_t RegressionTreeModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

Json RegressionTreeModel::params() const {
  Json nodes = Json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"samples", n.samples}});
  }
  return Json{{"nodes", std::move(nodes)}};
}

std::vector<double> RegressionTreeModel::predict_columns(const std::vector<std::vector<double>>& features,
                                                         std::size_t rows) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const TreeNode* node = &nodes_.front();
    while (!node->is_leaf()) {
      const double v = features[static_cast<std::size_t>(node->feature)][r];
      node = &nodes_[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    out[r] = node->value;
  }
  return out;
}

Json schema_to_json(const Schema& schema) {
  Json out = Json::array();
  for (const auto& f : schema) out.push_back({{"name", f.name}, {"kind", std::string(to_string(f.kind))}});
  return out;
}

Schema schema_from_json(const Json& doc) {
  if (!doc.is_array()) fail(ErrorCode::ParseError, "schema must be an array");
  Schema out;
  for (const auto& f : doc) {
    out.push_back({f.at("name").get<std::string>(), value_kind_from_string(f.at("kind").get<std::string>())});
  }
  return out;
}

Json model_to_json(const Model& model) { return model.to_document(); }

ModelPtr model_from_json(const Json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
      fail(ErrorCode::VersionMismatch, "unsupported model format version " + doc.at("format_version").dump());
    }
    const auto kind = doc.at("kind").get<std::string>();
    auto inputs = schema_from_json(doc.at("input_schema"));
    auto outputs = schema_from_json(doc.at("output_schema"));
    const auto& params = doc.at("params");
    if (kind == "constant") {
      return std::make_shared<ConstantModel>(std::move(inputs), std::move(outputs), params.at("value").get<double>());
    }
    if (kind == "linear") {
      return std::make_shared<LinearModel>(std::move(inputs), std::move(outputs),
                                           params.at("weights").get<std::vector<double>>(),
                                           params.at("intercept").get<double>());
    }
    if (kind == "regression_tree") {
      std::vector<TreeNode> nodes;
      for (const auto& n : params.at("nodes")) {
        nodes.push_back({n.at("feature").get<std::int32_t>(), n.at("threshold").get<double>(),
                         n.at("left").get<std::int32_t>(), n.at("right").get<std::int32_t>(),
                         n.at("value").get<double>(), n.at("samples").get<std::size_t>()});
      }
      return std::make_shared<RegressionTreeModel>(std::move(inputs), std::move(outputs), std::move(nodes));
    }
    fail(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file(path, model_to_json(model).dump(2) + "\n");
}

ModelPtr load_model(const std::filesystem::path& path) {
  const auto text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("invalid model file: ") + e.what());
  }
  return model_from_json(doc);
}

}  // namespace cpsflow
