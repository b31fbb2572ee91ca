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

#include "cpsflow/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "learners_models";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

struct TrainingData {
  std::vector<std::vector<double>> features;  // column-major
  std::vector<double> targets;
  Schema input_schema;
  Schema output_schema;
};

TrainingData training_data(const Dataset& inputs, const Dataset& outputs) {
  if (outputs.column_count() != 1) {
    fail(ErrorCode::ShapeMismatch, "expected a single output column, got " + std::to_string(outputs.column_count()));
  }
  if (inputs.row_count() != outputs.row_count()) {
    fail(ErrorCode::ShapeMismatch, "inputs have " + std::to_string(inputs.row_count()) + " rows, outputs " +
                                       std::to_string(outputs.row_count()));
  }
  TrainingData out;
  for (std::size_t c = 0; c < inputs.column_count(); ++c) {
    if (!inputs.column(c).is_numeric()) fail(ErrorCode::TypeMismatch, "input '" + inputs.name(c) + "' is not numeric");
    out.features.push_back(inputs.column(c).to_float64());
  }
  if (!outputs.column(0).is_numeric()) fail(ErrorCode::TypeMismatch, "output '" + outputs.name(0) + "' is not numeric");
  out.targets = outputs.column(0).to_float64();
  for (const auto& col : out.features) {
    for (double v : col) {
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "training inputs must be finite");
    }
  }
  for (double v : out.targets) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "training targets must be finite");
  }
  out.input_schema = inputs.schema();
  out.output_schema = outputs.schema();
  return out;
}

// --- tree -------------------------------------------------------------------

constexpr double kSplitTieTolerance = 1e-12;

class TreeBuilder {
 public:
  TreeBuilder(const TrainingData& data, const TreeParams& params) : data_(data), params_(params) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> rows(data_.targets.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    std::int32_t feature = TreeNode::kLeaf;
    double threshold = 0.0;
    double gain = -1.0;
  };

  std::int32_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    double sum = 0.0;
    double lo = data_.targets[rows.front()];
    double hi = lo;
    for (auto r : rows) {
      const double y = data_.targets[r];
      sum += y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    const double mean = sum / static_cast<double>(rows.size());
    nodes_[static_cast<std::size_t>(index)].value = mean;
    nodes_[static_cast<std::size_t>(index)].samples = rows.size();

    if (depth >= params_.max_depth || rows.size() < 2 * params_.min_samples_leaf || lo == hi) return index;

    const Split split = best_split(rows, mean);
    if (split.feature == TreeNode::kLeaf) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto& column = data_.features[static_cast<std::size_t>(split.feature)];
    for (auto r : rows) (column[r] <= split.threshold ? left : right).push_back(r);

    const std::int32_t l = grow(left, depth + 1);
    const std::int32_t r = grow(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  // Maximizes sL^2/nL + sR^2/nR over centered targets, which is the same as
  // minimizing the summed squared error of the two children.
  Split best_split(const std::vector<std::size_t>& rows, double mean) const {
    const std::size_t n = rows.size();
    const std::size_t min_leaf = params_.min_samples_leaf;
    Split best;
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < data_.features.size(); ++f) {
      const auto& column = data_.features[f];
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
      double total = 0.0;
      for (auto r : order) total += data_.targets[r] - mean;
      double left_sum = 0.0;
      for (std::size_t k = 1; k < n; ++k) {
        left_sum += data_.targets[order[k - 1]] - mean;
        const double a = column[order[k - 1]];
        const double b = column[order[k]];
        if (a == b || k < min_leaf || n - k < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(k) +
                            right_sum * right_sum / static_cast<double>(n - k);
        if (best.feature == TreeNode::kLeaf || gain > best.gain + kSplitTieTolerance) {
          double threshold = std::midpoint(a, b);
          if (threshold >= b) threshold = a;
          best = {static_cast<std::int32_t>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  const TrainingData& data_;
  const TreeParams& params_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

// --- OLS --------------------------------------------------------------------

std::shared_ptr<const LinearModel> fit_linear(const Dataset& inputs, const Dataset& outputs) {
  const TrainingData data = training_data(inputs, outputs);
  const std::size_t n = data.targets.size();
  const std::size_t p = data.features.size();
  if (n < p + 1) {
    fail(ErrorCode::SingularDesign, std::to_string(n) + " rows cannot determine " + std::to_string(p) +
                                        " weights and an intercept");
  }
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < n; ++r) design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data.features[c][r];
  }
  design.col(static_cast<Eigen::Index>(p)).setOnes();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.targets.data(), static_cast<Eigen::Index>(n));

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(p + 1)) {
    fail(ErrorCode::SingularDesign, "design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                                        std::to_string(p + 1) + "); add explicit regularization or drop columns");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  std::vector<double> weights(beta.data(), beta.data() + p);
  return std::make_shared<LinearModel>(data.input_schema, data.output_schema, std::move(weights),
                                       beta(static_cast<Eigen::Index>(p)));
}

ModelPtr LinearRegressionLearner::learn(const Dataset& inputs, const Dataset& outputs) const {
  return fit_linear(inputs, outputs);
}

ModelPtr MeanLearner::learn(const Dataset& inputs, const Dataset& outputs) const {
  const TrainingData data = training_data(inputs, outputs);
  if (data.targets.empty()) fail(ErrorCode::EmptyDataset, "cannot learn a mean from zero rows");
  double sum = 0.0;
  for (double v : data.targets) sum += v;
  return std::make_shared<ConstantModel>(data.input_schema, data.output_schema,
                                         sum / static_cast<double>(data.targets.size()));
}

// --- tree -------------------------------------------------------------------

std::shared_ptr<const RegressionTreeModel> fit_tree(const Dataset& inputs, const Dataset& outputs,
                                                    const TreeParams& params) {
  if (params.min_samples_leaf == 0) fail(ErrorCode::InvalidArgument, "min_samples_leaf must be at least 1");
  const TrainingData data = training_data(inputs, outputs);
  if (data.targets.empty() || data.targets.size() < 2 * params.min_samples_leaf) {
    fail(ErrorCode::TooFewSamples, std::to_string(data.targets.size()) + " rows, need at least " +
                                       std::to_string(std::max<std::size_t>(1, 2 * params.min_samples_leaf)));
  }
  TreeBuilder builder(data, params);
  return std::make_shared<RegressionTreeModel>(data.input_schema, data.output_schema, builder.build());
}

ModelPtr RegressionTreeLearner::learn(const Dataset& inputs, const Dataset& outputs) const {
  return fit_tree(inputs, outputs, params_);
}

// --- RLS --------------------------------------------------------------------

RlsState::RlsState(std::size_t dimension, double forgetting_factor, double regularization)
    : weights_(dimension, 0.0), p_(dimension * dimension, 0.0), lambda_(forgetting_factor), delta_(regularization) {
  if (dimension == 0) fail(ErrorCode::InvalidArgument, "RLS dimension must be positive");
  if (!(lambda_ > 0.0 && lambda_ <= 1.0)) fail(ErrorCode::InvalidArgument, "forgetting factor must lie in (0, 1]");
  if (!(delta_ > 0.0)) fail(ErrorCode::InvalidArgument, "RLS regularization must be positive");
  for (std::size_t i = 0; i < dimension; ++i) p_[i * dimension + i] = 1.0 / delta_;
}

double RlsState::predict(std::span<const double> input) const {
  if (input.size() != dimension()) {
    fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(input.size()) + " entries, state has " +
                                           std::to_string(dimension()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < input.size(); ++i) acc += weights_[i] * input[i];
  return acc;
}

double RlsState::uncertainty(std::span<const double> input) const {
  const std::size_t d = dimension();
  if (input.size() != d) fail(ErrorCode::DimensionMismatch, "input dimension does not match RLS state");
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += p_[i * d + j] * input[j];
    acc += input[i] * row;
  }
  return acc;
}

void RlsState::update(std::span<const double> input, double target) {
  const std::size_t d = dimension();
  if (input.size() != d) {
    fail(ErrorCode::DimensionMismatch, "input has " + std::to_string(input.size()) + " entries, state has " +
                                           std::to_string(d));
  }
  std::vector<double> pz(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) pz[i] += p_[i * d + j] * input[j];
  }
  double zpz = 0.0;
  for (std::size_t i = 0; i < d; ++i) zpz += input[i] * pz[i];
  const double denom = lambda_ + zpz;
  const double error = target - predict(input);
  for (std::size_t i = 0; i < d; ++i) weights_[i] += pz[i] / denom * error;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) p_[i * d + j] = (p_[i * d + j] - pz[i] * pz[j] / denom) / lambda_;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double s = 0.5 * (p_[i * d + j] + p_[j * d + i]);
      p_[i * d + j] = s;
      p_[j * d + i] = s;
    }
  }
  ++updates_;
}

RlsState rls_update(RlsState state, std::span<const double> input, double target) {
  state.update(input, target);
  return state;
}

std::shared_ptr<const LinearModel> finalize_incremental(const RlsState& state, Schema input_schema,
                                                        Schema output_schema) {
  if (state.updates() == 0) fail(ErrorCode::NeverUpdated, "incremental learner finalized before any update");
  if (state.dimension() != input_schema.size() + 1) {
    fail(ErrorCode::DimensionMismatch, "RLS state does not match the input schema plus intercept");
  }
  const auto& w = state.weights();
  return std::make_shared<LinearModel>(std::move(input_schema), std::move(output_schema),
                                       std::vector<double>(w.begin(), w.end() - 1), w.back());
}

void IncrementalLinearLearner::update(const Dataset& inputs, const Dataset& outputs) {
  const TrainingData data = training_data(inputs, outputs);
  if (!state_) {
    state_.emplace(data.features.size() + 1, params_.forgetting_factor, params_.regularization);
    input_schema_ = data.input_schema;
    output_schema_ = data.output_schema;
  } else if (data.input_schema != input_schema_ || data.output_schema != output_schema_) {
    fail(ErrorCode::SchemaMismatch, "batch schema differs from the first batch");
  }
  std::vector<double> z(data.features.size() + 1, 1.0);
  for (std::size_t r = 0; r < data.targets.size(); ++r) {
    for (std::size_t c = 0; c < data.features.size(); ++c) z[c] = data.features[c][r];
    state_->update(z, data.targets[r]);
  }
  ++batches_;
}

ModelPtr IncrementalLinearLearner::finalize() const {
  if (!state_) fail(ErrorCode::NeverUpdated, "incremental learner finalized before any update");
  return finalize_incremental(*state_, input_schema_, output_schema_);
}

// --- active -----------------------------------------------------------------

ActivePolicy::ActivePolicy(ActionSpace space, ActivePolicyParams params)
    : space_(space),
      params_(std::move(params)),
      surrogate_(params_.state_columns.size() + 2, params_.rls.forgetting_factor, params_.rls.regularization),
      rng_(params_.seed) {
  if (!(params_.epsilon >= 0.0 && params_.epsilon <= 1.0)) fail(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
  if (params_.grid_size == 0) fail(ErrorCode::InvalidArgument, "action grid needs at least one point");
  if (!(space_.low <= space_.high)) fail(ErrorCode::InvalidArgument, "empty action space");
  const std::size_t g = params_.grid_size;
  for (std::size_t i = 0; i < g; ++i) {
    grid_.push_back(g == 1 ? space_.low
                           : space_.low + (space_.high - space_.low) * static_cast<double>(i) / static_cast<double>(g - 1));
  }
  grid_.back() = g == 1 ? space_.low : space_.high;
}

double ActivePolicy::uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::vector<double> ActivePolicy::features(const Dataset& observation, double action) const {
  if (observation.row_count() != 1) {
    fail(ErrorCode::SchemaMismatch, "observation must be a single row, got " + std::to_string(observation.row_count()));
  }
  std::vector<double> z;
  z.reserve(params_.state_columns.size() + 2);
  for (const auto& name : params_.state_columns) {
    if (!observation.has_column(name)) fail(ErrorCode::SchemaMismatch, "observation lacks column '" + name + "'");
    z.push_back(observation.column(name).to_float64().front());
  }
  z.push_back(action);
  z.push_back(1.0);
  return z;
}

double ActivePolicy::target(const Dataset& observation) const {
  if (observation.row_count() != 1 || !observation.has_column(params_.target_column)) {
    fail(ErrorCode::SchemaMismatch, "next observation must be a single row with column '" + params_.target_column + "'");
  }
  return observation.column(params_.target_column).to_float64().front();
}

double ActivePolicy::propose_action(const Dataset& observation) {
  const auto probe = features(observation, grid_.front());
  if (uniform01() < params_.epsilon) return grid_[static_cast<std::size_t>(rng_() % grid_.size())];
  if (surrogate_.updates() == 0) return grid_.front();

  std::size_t best = 0;
  double best_score = -1.0;
  auto z = probe;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    z[params_.state_columns.size()] = grid_[i];
    const double score = surrogate_.uncertainty(z);
    if (i == 0 || score > best_score * (1.0 + 1e-12)) {
      best = i;
      best_score = score;
    }
  }
  return grid_[best];
}

void ActivePolicy::learn_step(const Dataset& observation, double action, const Dataset& next_observation) {
  auto z = features(observation, action);
  const double y = target(next_observation);
  surrogate_.update(z, y);
  buffer_.push_back({std::move(z), y});
}

Schema ActivePolicy::surrogate_input_schema() const {
  Schema schema;
  for (const auto& name : params_.state_columns) schema.push_back({name, ValueKind::Float64});
  schema.push_back({"action", ValueKind::Float64});
  return schema;
}

Schema ActivePolicy::surrogate_output_schema() const {
  return {{params_.target_column + "_next", ValueKind::Float64}};
}

ModelPtr ActivePolicy::finalize() const {
  return finalize_incremental(surrogate_, surrogate_input_schema(), surrogate_output_schema());
}

}  // namespace cpsflow
