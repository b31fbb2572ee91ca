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
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cpsflow/dataset.hpp"
#include "cpsflow/environments.hpp"
#include "cpsflow/models.hpp"

namespace cpsflow {

// ---------------------------------------------------------------------------
// Learner interfaces

class OfflineLearner {
 public:
  virtual ~OfflineLearner() = default;
  virtual std::string name() const = 0;
  /// `outputs` holds a single column row-aligned with `inputs`.
  virtual ModelPtr learn(const Dataset& inputs, const Dataset& outputs) const = 0;
};

class IncrementalLearner {
 public:
  virtual ~IncrementalLearner() = default;
  virtual std::string name() const = 0;
  virtual void update(const Dataset& inputs, const Dataset& outputs) = 0;
  /// Snapshot of the current state. Throws NeverUpdated before the first update.
  virtual ModelPtr finalize() const = 0;
};

class ActiveLearner {
 public:
  virtual ~ActiveLearner() = default;
  virtual std::string name() const = 0;
  virtual double propose_action(const Dataset& observation) = 0;
  virtual void learn_step(const Dataset& observation, double action, const Dataset& next_observation) = 0;
  virtual ModelPtr finalize() const = 0;
};

// ---------------------------------------------------------------------------
// Ordinary least squares

std::shared_ptr<const LinearModel> fit_linear(const Dataset& inputs, const Dataset& outputs);

class LinearRegressionLearner final : public OfflineLearner {
 public:
  std::string name() const override { return "linear"; }
  ModelPtr learn(const Dataset& inputs, const Dataset& outputs) const override;
};

/// Predicts the training mean regardless of input.
class MeanLearner final : public OfflineLearner {
 public:
  std::string name() const override { return "mean"; }
  ModelPtr learn(const Dataset& inputs, const Dataset& outputs) const override;
};

// ---------------------------------------------------------------------------
// CART regression tree

struct TreeParams {
  std::size_t max_depth = 5;
  std::size_t min_samples_leaf = 1;
};

/// Greedy variance-reduction tree. Split candidates are midpoints between
/// consecutive distinct values; ties (within 1e-12) keep the lower feature
/// index, then the lower threshold.
std::shared_ptr<const RegressionTreeModel> fit_tree(const Dataset& inputs, const Dataset& outputs,
                                                    const TreeParams& params = {});

class RegressionTreeLearner final : public OfflineLearner {
 public:
  explicit RegressionTreeLearner(TreeParams params = {}) : params_(params) {}
  std::string name() const override { return "regression_tree"; }
  ModelPtr learn(const Dataset& inputs, const Dataset& outputs) const override;
  const TreeParams& params() const { return params_; }

 private:
  TreeParams params_;
};

// ---------------------------------------------------------------------------
// Recursive least squares

/// Weights and inverse-Gram matrix of an RLS estimator over raw input
/// vectors (no implicit intercept).
class RlsState {
 public:
  /// P starts at I / regularization.
  RlsState(std::size_t dimension, double forgetting_factor = 1.0, double regularization = 1e-8);

  std::size_t dimension() const { return weights_.size(); }
  double forgetting_factor() const { return lambda_; }
  double regularization() const { return delta_; }
  std::size_t updates() const { return updates_; }

  const std::vector<double>& weights() const { return weights_; }
  /// Row-major dimension x dimension.
  const std::vector<double>& inverse_gram() const { return p_; }

  double predict(std::span<const double> input) const;
  /// z' P z, the (unscaled) predictive variance of `input`.
  double uncertainty(std::span<const double> input) const;

  /// In-place rank-one update. Throws DimensionMismatch.
  void update(std::span<const double> input, double target);

 private:
  std::vector<double> weights_;
  std::vector<double> p_;
  double lambda_;
  double delta_;
  std::size_t updates_ = 0;
};

RlsState rls_update(RlsState state, std::span<const double> input, double target);

/// Linear model with the intercept taken as the last weight of `state`
/// (inputs augmented with a trailing 1). Throws NeverUpdated.
std::shared_ptr<const LinearModel> finalize_incremental(const RlsState& state, Schema input_schema,
                                                        Schema output_schema);

struct RlsParams {
  double forgetting_factor = 1.0;
  double regularization = 1e-8;
};

/// Streams rows through RLS with an intercept term.
class IncrementalLinearLearner final : public IncrementalLearner {
 public:
  explicit IncrementalLinearLearner(RlsParams params = {}) : params_(params) {}

  std::string name() const override { return "incremental_linear"; }
  void update(const Dataset& inputs, const Dataset& outputs) override;
  ModelPtr finalize() const override;

  const std::optional<RlsState>& state() const { return state_; }
  std::size_t batches() const { return batches_; }

 private:
  RlsParams params_;
  std::optional<RlsState> state_;
  Schema input_schema_;
  Schema output_schema_;
  std::size_t batches_ = 0;
};

// ---------------------------------------------------------------------------
// Active learning

struct ActivePolicyParams {
  double epsilon = 0.3;
  /// Evenly spaced over the action space, endpoints included.
  std::size_t grid_size = 11;
  std::uint64_t seed = 0;
  /// Observation columns fed to the surrogate, followed by the action.
  std::vector<std::string> state_columns{"x"};
  /// Observation column the surrogate predicts one step ahead.
  std::string target_column = "x";
  RlsParams rls{1.0, 1e-2};
};

/// Epsilon-greedy, uncertainty-seeking controller over an action grid. The
/// surrogate is an RLS model of (state, action, 1) -> next target; the greedy
/// choice maximizes its predictive variance. Before the first update every
/// action scores equal and the first grid action wins.
class ActivePolicy final : public ActiveLearner {
 public:
  ActivePolicy(ActionSpace space, ActivePolicyParams params = {});

  std::string name() const override { return "active_rls"; }
  double propose_action(const Dataset& observation) override;
  void learn_step(const Dataset& observation, double action, const Dataset& next_observation) override;
  ModelPtr finalize() const override;

  const std::vector<double>& grid() const { return grid_; }
  const RlsState& surrogate() const { return surrogate_; }
  std::size_t transitions() const { return buffer_.size(); }
  /// Surrogate input schema: state columns then "action".
  Schema surrogate_input_schema() const;
  Schema surrogate_output_schema() const;

 private:
  std::vector<double> features(const Dataset& observation, double action) const;
  double target(const Dataset& observation) const;
  double uniform01();

  ActionSpace space_;
  ActivePolicyParams params_;
  std::vector<double> grid_;
  RlsState surrogate_;
  std::mt19937_64 rng_;
  struct Transition {
    std::vector<double> features;
    double target;
  };
  std::vector<Transition> buffer_;
};

}  // namespace cpsflow
