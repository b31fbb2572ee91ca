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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cpsflow/dataset.hpp"
#include "cpsflow/io.hpp"

namespace cpsflow {

inline constexpr int kModelFormatVersion = 1;

/// Trained artifact. Immutable after construction; predict() is safe to call
/// concurrently and needs no learner.
class Model {
 public:
  Model(Schema input_schema, Schema output_schema);
  virtual ~Model() = default;

  virtual std::string kind() const = 0;

  /// `inputs` must carry exactly the input schema's columns, in order, with
  /// numeric values. Returns one output column, row-aligned.
  virtual Dataset predict(const Dataset& inputs) const;

  const Schema& input_schema() const { return input_schema_; }
  const Schema& output_schema() const { return output_schema_; }

  virtual Json params() const = 0;
  /// Versioned document {format_version, kind, input_schema, output_schema, params}.
  virtual Json to_document() const;

 protected:
  /// Column-major numeric features; every column has the same length.
  virtual std::vector<double> predict_columns(const std::vector<std::vector<double>>& features,
                                              std::size_t rows) const = 0;

  /// Throws SchemaMismatch unless `inputs` matches the input schema.
  std::vector<std::vector<double>> checked_features(const Dataset& inputs) const;

 private:
  Schema input_schema_;
  Schema output_schema_;
};

using ModelPtr = std::shared_ptr<const Model>;

Dataset predict(const Model& model, const Dataset& inputs);

class ConstantModel final : public Model {
 public:
  ConstantModel(Schema input_schema, Schema output_schema, double value);

  std::string kind() const override { return "constant"; }
  Json params() const override;
  double value() const { return value_; }

 protected:
  std::vector<double> predict_columns(const std::vector<std::vector<double>>& features,
                                      std::size_t rows) const override;

 private:
  double value_;
};

class LinearModel final : public Model {
 public:
  LinearModel(Schema input_schema, Schema output_schema, std::vector<double> weights, double intercept);

  std::string kind() const override { return "linear"; }
  Json params() const override;

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }

 protected:
  std::vector<double> predict_columns(const std::vector<std::vector<double>>& features,
                                      std::size_t rows) const override;

 private:
  std::vector<double> weights_;
  double intercept_;
};

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;  // rows with value <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;      // mean target of the training rows reaching the node
  std::size_t samples = 0;

  bool is_leaf() const { return feature == kLeaf; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary regression tree; node 0 is the root.
class RegressionTreeModel final : public Model {
 public:
  RegressionTreeModel(Schema input_schema, Schema output_schema, std::vector<TreeNode> nodes);

  std::string kind() const override { return "regression_tree"; }
  Json params() const override;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

 protected:
  std::vector<double> predict_columns(const std::vector<std::vector<double>>& features,
                                      std::size_t rows) const override;

 private:
  std::vector<TreeNode> nodes_;
};

Json schema_to_json(const Schema& schema);
Schema schema_from_json(const Json& doc);

Json model_to_json(const Model& model);
/// Inverse of model_to_json for the local kinds (constant, linear, regression_tree).
ModelPtr model_from_json(const Json& doc);

void save_model(const Model& model, const std::filesystem::path& path);
ModelPtr load_model(const std::filesystem::path& path);

}  // namespace cpsflow
