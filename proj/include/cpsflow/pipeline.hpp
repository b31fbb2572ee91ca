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

// Declarative pipeline configuration and its runner.
//
// A config is a JSON document:
//
//   {
//     "environment": {"kind": "ode_watertank", ...},
//     "transforms":  [{"kind": "sliding_window", "window_size": 3}],
//     "io":          {"inputs": [...], "outputs": ["x_2"]},
//     "learner":     {"kind": "regression_tree", "max_depth": 5},
//     "split":       0.8,
//     "metrics":     ["mae", "mse"],
//     "seed":        0,
//     "output":      {"report": "report.json", "model": "model.fcm.json"}
//   }
//
// The learning strategy follows from the learner kind: offline learners run
// the offline strategy, "incremental_linear" replays the training split in
// batches, and "active_rls" drives a "watertank_active" environment.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpsflow/error.hpp"
#include "cpsflow/io.hpp"
#include "cpsflow/metrics.hpp"
#include "cpsflow/models.hpp"
#include "cpsflow/ode.hpp"
#include "cpsflow/strategies.hpp"
#include "cpsflow/transforms.hpp"

namespace cpsflow {

/// Configuration problem located at a JSON path such as "learner.max_depth".
class ConfigError : public Error {
 public:
  ConfigError(std::string file, std::string field, const std::string& message)
      : Error(ErrorCode::ConfigError, "cli",
              (file.empty() ? "" : file + ": ") + (field.empty() ? "" : field + ": ") + message),
        file_(std::move(file)), field_(std::move(field)) {}

  const std::string& file() const { return file_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  std::string field_;
};

struct Diagnostic {
  std::string field;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

enum class StrategyKind { Offline, Incremental, Active };

struct EnvironmentSpec {
  std::string kind;  // csv | json | ode_watertank | watertank_active
  // csv / json
  std::filesystem::path path;
  bool has_header = true;
  char delimiter = ',';
  // water tank, passive and active
  WaterTankParams tank;
  double x0 = 1.0;
  double dt = 0.1;
  std::size_t samples = 250;
  double substep = 1e-3;
  // active only
  std::size_t step_budget = 500;
  std::size_t eval_steps = 200;
};

struct LearnerSpec {
  std::string kind;  // regression_tree | linear | mean | incremental_linear | active_rls | remote
  std::size_t max_depth = 5;
  std::size_t min_samples_leaf = 1;
  double forgetting_factor = 1.0;
  double regularization = 1e-8;
  std::size_t batch_size = 16;
  double epsilon = 0.3;
  std::size_t grid_size = 11;
  std::string address;
  std::int64_t timeout_ms = 30000;
};

struct PipelineConfig {
  EnvironmentSpec environment;
  TransformChain transforms;
  IoSpec io;
  LearnerSpec learner;
  double split = 0.8;
  std::vector<metrics::MetricSpec> metrics;
  std::optional<std::uint64_t> seed;
  std::string report_path = "report.json";
  std::string model_path = "model.fcm.json";

  StrategyKind strategy() const;
};

/// Every problem found in `doc`; empty means valid. `base_dir` resolves
/// relative data paths.
std::vector<Diagnostic> validate_config(const Json& doc, const std::filesystem::path& base_dir = {});

/// Throws ConfigError naming the first offending field.
PipelineConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {},
                            const std::string& file = {});
PipelineConfig load_config(const std::filesystem::path& path);

struct RunResult {
  EvaluationReport report;
  ModelPtr model;
  std::size_t raw_rows = 0;
  std::size_t transformed_rows = 0;
  std::size_t train_rows = 0;
  std::size_t eval_rows = 0;
};

/// Environment -> transforms -> split -> learn -> evaluate.
RunResult run_pipeline(const PipelineConfig& config);

/// Runs and writes the report and model files under `out_dir`.
RunResult run_and_write(const PipelineConfig& config, const std::filesystem::path& out_dir);

struct WatertankOverrides {
  std::string learner = "tree";  // tree | linear | incremental_linear
  std::size_t max_depth = 5;
};

/// Built-in water-tank scenario: ODE (A=5, a=0.5, b=2, x0=1, dt=0.1, 250 samples),
/// sliding window of 3, inputs V_0 x_0 V_1 x_1 V_2, target x_2, 80/20 split,
/// MAE and MSE.
PipelineConfig watertank_config(const WatertankOverrides& overrides = {});
Json watertank_config_json(const WatertankOverrides& overrides = {});

/// One-step transitions {x, action, x_next} of the active water tank driven
/// by the held sine inflow instead of a learner.
Dataset passive_transitions(const WaterTankParams& params, double x0, double dt, double substep, std::size_t steps);

}  // namespace cpsflow
