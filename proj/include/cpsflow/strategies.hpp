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
#include <string>
#include <utility>
#include <vector>

#include "cpsflow/environments.hpp"
#include "cpsflow/io.hpp"
#include "cpsflow/learners.hpp"
#include "cpsflow/metrics.hpp"
#include "cpsflow/models.hpp"
#include "cpsflow/transforms.hpp"

namespace cpsflow {

/// Input and output column names; non-empty and disjoint.
struct IoSpec {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void validate() const;
};

inline constexpr int kReportSchemaVersion = 1;

struct EvaluationReport {
  std::string model;
  std::size_t rows = 0;
  std::vector<std::pair<std::string, double>> metrics;
  /// Metric names whose value fell back to 0 on an empty denominator.
  std::vector<std::string> warnings;

  double metric(const std::string& name) const;
  /// {"schema_version", "model", "rows", "metrics": {name: value}[, "warnings"]}
  Json to_json() const;
};

/// Observe once, apply `extra` (fitting adaptive members on the observed
/// data), select inputs and outputs, learn.
ModelPtr learn_offline(OfflineEnvironment& env, const TransformChain& extra, const IoSpec& io,
                       const OfflineLearner& learner);

/// Batch loop until the environment is exhausted. Adaptive members of
/// `extra` must already be fitted.
ModelPtr learn_incremental(IncrementalEnvironment& env, const TransformChain& extra, const IoSpec& io,
                           IncrementalLearner& learner);

/// Observe, request action, act, advance, observe, learn; `step_budget` times.
ModelPtr learn_active(ActiveEnvironment& env, ActiveLearner& learner, std::size_t step_budget);

EvaluationReport evaluate(OfflineEnvironment& env, const Model& model, const IoSpec& io,
                          const std::vector<metrics::MetricSpec>& metric_specs);

}  // namespace cpsflow
