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

#include "cpsflow/pipeline.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>

#include "cpsflow/environments.hpp"
#include "cpsflow/learners.hpp"
#include "cpsflow/remote.hpp"

namespace cpsflow {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kOfflineLearners{"regression_tree", "linear", "mean", "remote"};
const std::set<std::string> kPassiveEnvironments{"csv", "json", "ode_watertank"};

// Walks a config document, collecting every problem instead of stopping at
// the first one.
class Reader {
 public:
  explicit Reader(fs::path base_dir) : base_dir_(std::move(base_dir)) {}

  std::vector<Diagnostic> diagnostics;

  void error(const std::string& field, const std::string& message) { diagnostics.push_back({field, message}); }

  PipelineConfig read(const Json& doc) {
    PipelineConfig cfg;
    if (!doc.is_object()) {
      error("", "config must be a JSON object");
      return cfg;
    }
    allowed(doc, "", {"environment", "transforms", "io", "learner", "split", "metrics", "seed", "output"});

    read_environment(doc, cfg);
    read_transforms(doc, cfg);
    read_learner(doc, cfg);

    const bool active = cfg.learner.kind == "active_rls";
    if (doc.contains("io")) {
      read_io(doc["io"], cfg);
    } else if (!active) {
      error("io", "missing required field");
    }
    if (doc.contains("split")) {
      cfg.split = number(doc["split"], "split", cfg.split);
      if (!(cfg.split > 0.0 && cfg.split < 1.0)) error("split", "must lie strictly between 0 and 1");
    }
    read_metrics(doc, cfg);
    if (doc.contains("seed")) {
      const Json& s = doc["seed"];
      if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
        cfg.seed = s.get<std::uint64_t>();
      } else {
        error("seed", "must be a non-negative integer");
      }
    }
    if (doc.contains("output")) read_output(doc["output"], cfg);

    cross_check(cfg);
    return cfg;
  }

 private:
  void allowed(const Json& obj, const std::string& prefix, std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : obj.items()) {
      bool ok = false;
      for (const char* k : keys) ok = ok || key == k;
      if (!ok) error(join(prefix, key), "unknown field");
    }
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  double number(const Json& v, const std::string& field, double fallback) {
    if (!v.is_number()) {
      error(field, "must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      error(field, "must be finite");
      return fallback;
    }
    return d;
  }

  double positive(const Json& obj, const std::string& prefix, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const double d = number(obj[key], join(prefix, key), fallback);
    if (!(d > 0.0)) error(join(prefix, key), "must be positive");
    return d;
  }

  std::size_t count(const Json& obj, const std::string& prefix, const char* key, std::size_t fallback,
                    std::size_t minimum) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj[key];
    const std::string field = join(prefix, key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      error(field, "must be a non-negative integer");
      return fallback;
    }
    const auto n = v.get<std::uint64_t>();
    if (n < minimum) error(field, "must be at least " + std::to_string(minimum));
    return static_cast<std::size_t>(n);
  }

  std::string string(const Json& obj, const std::string& prefix, const char* key) {
    const std::string field = join(prefix, key);
    if (!obj.contains(key)) {
      error(field, "missing required field");
      return {};
    }
    if (!obj[key].is_string()) {
      error(field, "must be a string");
      return {};
    }
    return obj[key].get<std::string>();
  }

  std::vector<std::string> names(const Json& v, const std::string& field) {
    std::vector<std::string> out;
    if (!v.is_array()) {
      error(field, "must be an array of column names");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) {
        error(field + "[" + std::to_string(i) + "]", "must be a string");
        continue;
      }
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  void read_environment(const Json& doc, PipelineConfig& cfg) {
    if (!doc.contains("environment")) {
      error("environment", "missing required field");
      return;
    }
    const Json& e = doc["environment"];
    if (!e.is_object()) {
      error("environment", "must be an object");
      return;
    }
    EnvironmentSpec& env = cfg.environment;
    env.kind = string(e, "environment", "kind");
    const std::string p = "environment";
    if (env.kind == "csv" || env.kind == "json") {
      if (env.kind == "csv") {
        allowed(e, p, {"kind", "path", "has_header", "delimiter"});
        if (e.contains("has_header")) {
          if (e["has_header"].is_boolean()) env.has_header = e["has_header"].get<bool>();
          else error("environment.has_header", "must be a boolean");
        }
        if (e.contains("delimiter")) {
          if (e["delimiter"].is_string() && e["delimiter"].get<std::string>().size() == 1) {
            env.delimiter = e["delimiter"].get<std::string>()[0];
          } else {
            error("environment.delimiter", "must be a single character");
          }
        }
      } else {
        allowed(e, p, {"kind", "path"});
      }
      const std::string path = string(e, p, "path");
      if (!path.empty()) {
        env.path = fs::path(path).is_absolute() ? fs::path(path) : base_dir_ / path;
        std::error_code ec;
        if (!fs::is_regular_file(env.path, ec)) error("environment.path", "file not found: " + env.path.string());
      }
    } else if (env.kind == "ode_watertank" || env.kind == "watertank_active") {
      const bool active = env.kind == "watertank_active";
      if (active) {
        allowed(e, p, {"kind", "area", "outflow", "inflow_gain", "x0", "dt", "substep", "step_budget", "eval_steps"});
      } else {
        allowed(e, p, {"kind", "area", "outflow", "inflow_gain", "x0", "dt", "samples", "substep"});
      }
      env.tank.area = positive(e, p, "area", env.tank.area);
      env.tank.outflow = positive(e, p, "outflow", env.tank.outflow);
      env.tank.inflow_gain = positive(e, p, "inflow_gain", env.tank.inflow_gain);
      if (e.contains("x0")) {
        env.x0 = number(e["x0"], "environment.x0", env.x0);
        if (env.x0 < 0.0) error("environment.x0", "must be non-negative");
      }
      env.dt = positive(e, p, "dt", env.dt);
      env.substep = positive(e, p, "substep", env.substep);
      if (active) {
        env.step_budget = count(e, p, "step_budget", env.step_budget, 1);
        env.eval_steps = count(e, p, "eval_steps", env.eval_steps, 1);
      } else {
        env.samples = count(e, p, "samples", env.samples, 1);
      }
    } else if (!env.kind.empty()) {
      error("environment.kind", "unknown environment kind '" + env.kind + "'");
    }
  }

  void read_transforms(const Json& doc, PipelineConfig& cfg) {
    if (!doc.contains("transforms")) return;
    const Json& t = doc["transforms"];
    if (!t.is_array()) {
      error("transforms", "must be an array");
      return;
    }
    std::vector<TransformPtr> items;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string field = "transforms[" + std::to_string(i) + "]";
      try {
        items.push_back(transform_from_json(t[i]));
      } catch (const Error& err) {
        const bool kind_problem = t[i].is_object() && t[i].contains("kind") && t[i]["kind"].is_string() &&
                                  std::string_view(err.what()).find("unknown transform kind") != std::string_view::npos;
        error(kind_problem ? field + ".kind" : field, err.what());
      }
    }
    cfg.transforms = TransformChain(std::move(items));
  }

  void read_io(const Json& io, PipelineConfig& cfg) {
    if (!io.is_object()) {
      error("io", "must be an object");
      return;
    }
    allowed(io, "io", {"inputs", "outputs"});
    if (io.contains("inputs")) cfg.io.inputs = names(io["inputs"], "io.inputs");
    else error("io.inputs", "missing required field");
    if (io.contains("outputs")) cfg.io.outputs = names(io["outputs"], "io.outputs");
    else error("io.outputs", "missing required field");

    if (io.contains("inputs") && cfg.io.inputs.empty()) error("io.inputs", "must not be empty");
    if (io.contains("outputs") && cfg.io.outputs.size() != 1) error("io.outputs", "must name exactly one column");
    std::set<std::string> seen(cfg.io.inputs.begin(), cfg.io.inputs.end());
    if (seen.size() != cfg.io.inputs.size()) error("io.inputs", "duplicate column name");
    for (const auto& o : cfg.io.outputs) {
      if (seen.count(o)) error("io.outputs", "column '" + o + "' is also an input");
    }
  }

  void read_learner(const Json& doc, PipelineConfig& cfg) {
    if (!doc.contains("learner")) {
      error("learner", "missing required field");
      return;
    }
    const Json& l = doc["learner"];
    if (!l.is_object()) {
      error("learner", "must be an object");
      return;
    }
    LearnerSpec& spec = cfg.learner;
    const std::string p = "learner";
    spec.kind = string(l, p, "kind");
    if (spec.kind == "regression_tree") {
      allowed(l, p, {"kind", "max_depth", "min_samples_leaf"});
      spec.max_depth = count(l, p, "max_depth", spec.max_depth, 0);
      spec.min_samples_leaf = count(l, p, "min_samples_leaf", spec.min_samples_leaf, 1);
    } else if (spec.kind == "linear" || spec.kind == "mean") {
      allowed(l, p, {"kind"});
    } else if (spec.kind == "incremental_linear") {
      allowed(l, p, {"kind", "forgetting_factor", "regularization", "batch_size"});
      spec.forgetting_factor = positive(l, p, "forgetting_factor", spec.forgetting_factor);
      if (spec.forgetting_factor > 1.0) error("learner.forgetting_factor", "must lie in (0, 1]");
      spec.regularization = positive(l, p, "regularization", spec.regularization);
      spec.batch_size = count(l, p, "batch_size", spec.batch_size, 1);
    } else if (spec.kind == "active_rls") {
      allowed(l, p, {"kind", "epsilon", "grid_size", "forgetting_factor", "regularization"});
      spec.regularization = 1e-2;
      if (l.contains("epsilon")) {
        spec.epsilon = number(l["epsilon"], "learner.epsilon", spec.epsilon);
        if (spec.epsilon < 0.0 || spec.epsilon > 1.0) error("learner.epsilon", "must lie in [0, 1]");
      }
      spec.grid_size = count(l, p, "grid_size", spec.grid_size, 2);
      spec.forgetting_factor = positive(l, p, "forgetting_factor", spec.forgetting_factor);
      if (spec.forgetting_factor > 1.0) error("learner.forgetting_factor", "must lie in (0, 1]");
      spec.regularization = positive(l, p, "regularization", spec.regularization);
    } else if (spec.kind == "remote") {
      allowed(l, p, {"kind", "address", "timeout_ms"});
      spec.address = string(l, p, "address");
      spec.timeout_ms = static_cast<std::int64_t>(count(l, p, "timeout_ms", 30000, 1));
    } else if (!spec.kind.empty()) {
      error("learner.kind", "unknown learner kind '" + spec.kind + "'");
    }
  }

  void read_metrics(const Json& doc, PipelineConfig& cfg) {
    if (!doc.contains("metrics")) {
      error("metrics", "missing required field");
      return;
    }
    const Json& m = doc["metrics"];
    if (!m.is_array() || m.empty()) {
      error("metrics", "must be a non-empty array");
      return;
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string field = "metrics[" + std::to_string(i) + "]";
      metrics::MetricSpec spec;
      if (m[i].is_string()) {
        spec.name = m[i].get<std::string>();
      } else if (m[i].is_object()) {
        allowed(m[i], field, {"name", "beta"});
        spec.name = string(m[i], field, "name");
        if (m[i].contains("beta")) {
          spec.beta = number(m[i]["beta"], field + ".beta", 1.0);
          if (!(spec.beta > 0.0)) error(field + ".beta", "must be positive");
        }
      } else {
        error(field, "must be a metric name or {\"name\", \"beta\"}");
        continue;
      }
      if (!metrics::is_known_metric(spec.name)) {
        error(field, "unknown metric '" + spec.name + "'");
        continue;
      }
      if (!seen.insert(spec.name).second) error(field, "duplicate metric '" + spec.name + "'");
      cfg.metrics.push_back(spec);
    }
  }

  void read_output(const Json& o, PipelineConfig& cfg) {
    if (!o.is_object()) {
      error("output", "must be an object");
      return;
    }
    allowed(o, "output", {"report", "model"});
    if (o.contains("report")) cfg.report_path = string(o, "output", "report");
    if (o.contains("model")) cfg.model_path = string(o, "output", "model");
    if (!cfg.report_path.empty() && cfg.report_path == cfg.model_path) {
      error("output.model", "must differ from output.report");
    }
  }

  void cross_check(const PipelineConfig& cfg) {
    const std::string& env = cfg.environment.kind;
    const std::string& learner = cfg.learner.kind;
    if (env.empty() || learner.empty()) return;
    const bool active_env = env == "watertank_active";
    const bool active_learner = learner == "active_rls";
    if (active_learner && !active_env && kPassiveEnvironments.count(env)) {
      error("learner.kind", "active_rls needs an active environment (watertank_active)");
    }
    if (active_env && !active_learner && (kOfflineLearners.count(learner) || learner == "incremental_linear")) {
      error("environment.kind", "watertank_active can only drive the active_rls learner");
    }
    if (active_learner && !cfg.seed) error("seed", "required when a stochastic learner is configured");
  }

  fs::path base_dir_;
};

PipelineConfig read_checked(const Json& doc, const fs::path& base_dir, const std::string& file) {
  Reader reader(base_dir);
  PipelineConfig cfg = reader.read(doc);
  if (!reader.diagnostics.empty()) {
    const Diagnostic& d = reader.diagnostics.front();
    throw ConfigError(file, d.field, d.message);
  }
  return cfg;
}

// Fits each unfitted adaptive transform on the leading training fraction of
// its input, so held-out rows never inform the fitted statistics.
TransformChain fit_on_prefix(const TransformChain& chain, const Dataset& data, double fraction) {
  std::vector<TransformPtr> fitted;
  Dataset current = data;
  for (const auto& t : chain.items()) {
    TransformPtr use = t;
    if (t->is_adaptive() && !t->is_fitted()) {
      const auto head = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(current.row_count())));
      use = t->fit(current.slice_rows(0, std::max<std::size_t>(head, 1)));
    }
    current = use->apply(current);
    fitted.push_back(std::move(use));
  }
  return TransformChain(std::move(fitted));
}

std::unique_ptr<OfflineEnvironment> make_source(const EnvironmentSpec& env) {
  if (env.kind == "csv") {
    CsvOptions options;
    options.has_header = env.has_header;
    options.delimiter = env.delimiter;
    return std::make_unique<CsvEnvironment>(env.path, options);
  }
  if (env.kind == "json") return std::make_unique<JsonEnvironment>(env.path);
  auto system = std::make_shared<WaterTank>(env.tank);
  return std::make_unique<OdeEnvironment>(system, OdeState{0.0, {env.x0}}, env.dt, env.samples, env.substep);
}

std::shared_ptr<const OfflineLearner> make_offline_learner(const LearnerSpec& spec) {
  if (spec.kind == "regression_tree") {
    return std::make_shared<RegressionTreeLearner>(TreeParams{spec.max_depth, spec.min_samples_leaf});
  }
  if (spec.kind == "linear") return std::make_shared<LinearRegressionLearner>();
  if (spec.kind == "mean") return std::make_shared<MeanLearner>();
  RemoteOptions options;
  options.timeout = std::chrono::milliseconds(spec.timeout_ms);
  return std::make_shared<RemoteLearner>(RemoteSession::connect(spec.address, options));
}

RunResult run_active(const PipelineConfig& cfg) {
  const EnvironmentSpec& e = cfg.environment;
  WaterTankActiveEnvironment env(e.tank, e.x0, e.dt, e.substep);
  ActivePolicyParams params;
  params.epsilon = cfg.learner.epsilon;
  params.grid_size = cfg.learner.grid_size;
  params.seed = cfg.seed.value_or(0);
  params.rls = {cfg.learner.forgetting_factor, cfg.learner.regularization};
  ActivePolicy policy(env.action_space(), params);

  RunResult result;
  result.model = learn_active(env, policy, e.step_budget);
  result.train_rows = policy.transitions();

  const Dataset eval = passive_transitions(e.tank, e.x0, e.dt, e.substep, e.eval_steps);
  result.raw_rows = result.transformed_rows = result.eval_rows = eval.row_count();
  DatasetEnvironment eval_env(eval);
  const IoSpec io{{"x", "action"}, {"x_next"}};
  result.report = evaluate(eval_env, *result.model, io, cfg.metrics);
  return result;
}

}  // namespace

StrategyKind PipelineConfig::strategy() const {
  if (learner.kind == "incremental_linear") return StrategyKind::Incremental;
  if (learner.kind == "active_rls") return StrategyKind::Active;
  return StrategyKind::Offline;
}

std::vector<Diagnostic> validate_config(const Json& doc, const fs::path& base_dir) {
  Reader reader(base_dir);
  reader.read(doc);
  return std::move(reader.diagnostics);
}

PipelineConfig parse_config(const Json& doc, const fs::path& base_dir, const std::string& file) {
  return read_checked(doc, base_dir, file);
}

PipelineConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string(), "", std::string("invalid JSON: ") + e.what());
  }
  return read_checked(doc, path.parent_path(), path.string());
}

RunResult run_pipeline(const PipelineConfig& cfg) {
  if (cfg.strategy() == StrategyKind::Active) return run_active(cfg);

  RunResult result;
  auto source = make_source(cfg.environment);
  const Dataset raw = source->observe();
  result.raw_rows = raw.row_count();

  // Attaching the fitted chain keeps the split on transformed rows while
  // adaptive statistics only see the training portion.
  DatasetEnvironment env(raw);
  env.attach(fit_on_prefix(cfg.transforms, raw, cfg.split));
  const Dataset observed = env.observe();
  result.transformed_rows = observed.row_count();

  auto [train, eval] = vertical_split(observed, cfg.split);
  result.train_rows = train.row_count();
  result.eval_rows = eval.row_count();

  if (cfg.strategy() == StrategyKind::Incremental) {
    ReplayEnvironment stream(train, cfg.learner.batch_size);
    IncrementalLinearLearner learner(RlsParams{cfg.learner.forgetting_factor, cfg.learner.regularization});
    result.model = learn_incremental(stream, TransformChain{}, cfg.io, learner);
  } else {
    DatasetEnvironment train_env(train);
    result.model = learn_offline(train_env, TransformChain{}, cfg.io, *make_offline_learner(cfg.learner));
  }

  DatasetEnvironment eval_env(eval);
  result.report = evaluate(eval_env, *result.model, cfg.io, cfg.metrics);
  return result;
}

RunResult run_and_write(const PipelineConfig& cfg, const fs::path& out_dir) {
  RunResult result = run_pipeline(cfg);
  std::error_code ec;
  if (!out_dir.empty()) fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cli", "cannot create '" + out_dir.string() + "': " + ec.message());
  if (!cfg.report_path.empty()) write_file(out_dir / cfg.report_path, result.report.to_json().dump(2) + "\n");
  if (!cfg.model_path.empty()) write_file(out_dir / cfg.model_path, result.model->to_document().dump(2) + "\n");
  return result;
}

Json watertank_config_json(const WatertankOverrides& overrides) {
  Json learner;
  if (overrides.learner == "tree" || overrides.learner == "regression_tree") {
    learner = {{"kind", "regression_tree"}, {"max_depth", overrides.max_depth}};
  } else if (overrides.learner == "linear") {
    learner = {{"kind", "linear"}};
  } else if (overrides.learner == "incremental_linear") {
    learner = {{"kind", "incremental_linear"}};
  } else {
    throw ConfigError("", "learner", "unknown watertank learner '" + overrides.learner +
                                         "' (expected tree, linear or incremental_linear)");
  }
  return Json{
      {"environment",
       {{"kind", "ode_watertank"},
        {"area", 5.0},
        {"outflow", 0.5},
        {"inflow_gain", 2.0},
        {"x0", 1.0},
        {"dt", 0.1},
        {"samples", 250}}},
      {"transforms", Json::array({{{"kind", "sliding_window"}, {"window_size", 3}}})},
      {"io", {{"inputs", {"V_0", "x_0", "V_1", "x_1", "V_2"}}, {"outputs", {"x_2"}}}},
      {"learner", learner},
      {"split", 0.8},
      {"metrics", {"mae", "mse"}},
      {"seed", 0},
      {"output", {{"report", "report.json"}, {"model", "model.fcm.json"}}},
  };
}

PipelineConfig watertank_config(const WatertankOverrides& overrides) {
  return parse_config(watertank_config_json(overrides));
}

Dataset passive_transitions(const WaterTankParams& params, double x0, double dt, double substep, std::size_t steps) {
  WaterTankActiveEnvironment env(params, x0, dt, substep);
  std::vector<double> x, action, x_next;
  x.reserve(steps);
  action.reserve(steps);
  x_next.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double level = env.level();
    const double v = sine_inflow(env.time());
    env.act(v);
    env.advance();
    x.push_back(level);
    action.push_back(v);
    x_next.push_back(env.level());
  }
  return Dataset({{"x", Column(std::move(x))}, {"action", Column(std::move(action))}, {"x_next", Column(std::move(x_next))}},
                 steps);
}

}  // namespace cpsflow
