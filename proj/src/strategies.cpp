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

#include "cpsflow/strategies.hpp"

#include <set>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "strategies";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

std::pair<Dataset, Dataset> split_io(const Dataset& data, const IoSpec& io) {
  return {data.select(io.inputs), data.select(io.outputs)};
}

}  // namespace

void IoSpec::validate() const {
  if (inputs.empty()) fail(ErrorCode::InvalidArgument, "io spec needs at least one input column");
  if (outputs.empty()) fail(ErrorCode::InvalidArgument, "io spec needs at least one output column");
  std::set<std::string> seen(inputs.begin(), inputs.end());
  if (seen.size() != inputs.size()) fail(ErrorCode::InvalidArgument, "duplicate input column in io spec");
  for (const auto& o : outputs) {
    if (!seen.insert(o).second) fail(ErrorCode::InvalidArgument, "column '" + o + "' is both input and output");
  }
}

double EvaluationReport::metric(const std::string& name) const {
  for (const auto& [n, v] : metrics) {
    if (n == name) return v;
  }
  fail(ErrorCode::InvalidArgument, "report has no metric '" + name + "'");
}

Json EvaluationReport::to_json() const {
  Json values = Json::object();
  for (const auto& [n, v] : metrics) values[n] = v;
  Json out{{"schema_version", kReportSchemaVersion}, {"model", model}, {"rows", rows}, {"metrics", std::move(values)}};
  if (!warnings.empty()) out["warnings"] = warnings;
  return out;
}

ModelPtr learn_offline(OfflineEnvironment& env, const TransformChain& extra, const IoSpec& io,
                       const OfflineLearner& learner) {
  io.validate();
  const Dataset observed = env.observe();
  const Dataset transformed = extra.empty() ? observed : extra.fit(observed).apply(observed);
  const auto [inputs, outputs] = split_io(transformed, io);
  return learner.learn(inputs, outputs);
}

ModelPtr learn_incremental(IncrementalEnvironment& env, const TransformChain& extra, const IoSpec& io,
                           IncrementalLearner& learner) {
  io.validate();
  std::size_t updates = 0;
  while (auto batch = env.next_batch()) {
    const Dataset transformed = extra.apply(*batch);
    const auto [inputs, outputs] = split_io(transformed, io);
    learner.update(inputs, outputs);
    ++updates;
  }
  if (updates == 0) fail(ErrorCode::NeverUpdated, "incremental environment produced no batches");
  return learner.finalize();
}

ModelPtr learn_active(ActiveEnvironment& env, ActiveLearner& learner, std::size_t step_budget) {
  if (step_budget == 0) fail(ErrorCode::PreconditionViolation, "active learning needs a step budget of at least 1");
  for (std::size_t step = 0; step < step_budget; ++step) {
    const Dataset observation = env.observe();
    const double action = learner.propose_action(observation);
    env.act(action);
    env.advance();
    const Dataset next = env.observe();
    learner.learn_step(observation, action, next);
  }
  return learner.finalize();
}

EvaluationReport evaluate(OfflineEnvironment& env, const Model& model, const IoSpec& io,
                          const std::vector<metrics::MetricSpec>& metric_specs) {
  io.validate();
  if (metric_specs.empty()) fail(ErrorCode::PreconditionViolation, "evaluation needs at least one metric");
  if (io.outputs.size() != 1) fail(ErrorCode::SchemaMismatch, "evaluation compares exactly one output column");
  const Dataset data = env.observe();
  const auto [inputs, actual] = split_io(data, io);
  const Dataset predicted = model.predict(inputs);
  if (predicted.row_count() != actual.row_count()) {
    fail(ErrorCode::SchemaMismatch, "model returned " + std::to_string(predicted.row_count()) + " rows for " +
                                        std::to_string(actual.row_count()));
  }
  const auto p = predicted.column(0).to_float64();
  const auto a = actual.column(0).to_float64();

  EvaluationReport report;
  report.model = model.kind();
  report.rows = data.row_count();
  std::set<std::string> names;
  for (const auto& spec : metric_specs) {
    if (!names.insert(spec.name).second) fail(ErrorCode::InvalidArgument, "metric '" + spec.name + "' listed twice");
    const auto score = metrics::compute(spec, p, a);
    report.metrics.emplace_back(spec.name, score.value);
    if (score.zero_division) report.warnings.push_back(spec.name);
  }
  return report;
}

}  // namespace cpsflow
