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

// cpsflow command-line entry point. Failures print one JSON error record on
// stderr and exit nonzero; nothing else is written to stderr.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cpsflow/io.hpp"
#include "cpsflow/learners.hpp"
#include "cpsflow/models.hpp"
#include "cpsflow/pipeline.hpp"
#include "cpsflow/remote.hpp"

namespace {

using cpsflow::Json;

int emit_error(const std::string& code, const std::string& module, const std::string& message,
               const std::string& field = {}) {
  Json record{{"error", {{"code", code}, {"module", module}, {"message", message}}}};
  if (!field.empty()) record["error"]["field"] = field;
  std::cerr << record.dump() << std::endl;
  return 1;
}

void print_summary(const cpsflow::RunResult& r, const std::filesystem::path& out, const cpsflow::PipelineConfig& cfg) {
  Json summary{{"report", (out / cfg.report_path).string()},
               {"model", (out / cfg.model_path).string()},
               {"rows", {{"raw", r.raw_rows}, {"transformed", r.transformed_rows}, {"train", r.train_rows},
                         {"eval", r.eval_rows}}},
               {"metrics", r.report.to_json()["metrics"]}};
  std::cout << summary.dump(2) << std::endl;
}

int cmd_run(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed) {
  cpsflow::PipelineConfig cfg = cpsflow::load_config(config_path);
  if (seed) cfg.seed = seed;
  const auto result = cpsflow::run_and_write(cfg, out);
  print_summary(result, out, cfg);
  return 0;
}

int cmd_watertank(const std::string& learner, std::size_t max_depth, const std::string& out) {
  const auto cfg = cpsflow::watertank_config({learner, max_depth});
  const auto result = cpsflow::run_and_write(cfg, out);
  print_summary(result, out, cfg);
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const std::filesystem::path path(config_path);
  const std::string text = cpsflow::read_file(path);
  std::vector<cpsflow::Diagnostic> diags;
  try {
    diags = cpsflow::validate_config(Json::parse(text), path.parent_path());
  } catch (const Json::parse_error& e) {
    diags.push_back({"", std::string("invalid JSON: ") + e.what()});
  }
  Json list = Json::array();
  for (const auto& d : diags) list.push_back({{"field", d.field}, {"message", d.message}});
  std::cout << list.dump(2) << std::endl;
  if (diags.empty()) return 0;
  return emit_error("ConfigError", "cli", config_path + ": " + std::to_string(diags.size()) + " problem(s)",
                    diags.front().field);
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output) {
  const auto model = cpsflow::load_model(model_path);
  std::vector<std::string> names;
  for (const auto& f : model->input_schema()) names.push_back(f.name);
  const auto data = cpsflow::load_csv(input);
  const auto predictions = model->predict(cpsflow::select_columns(data, names));
  cpsflow::write_csv(predictions, output);
  return 0;
}

int cmd_serve(const std::string& listen, std::size_t max_sessions, const std::string& learner, std::size_t max_depth) {
  std::shared_ptr<const cpsflow::OfflineLearner> impl;
  if (learner == "linear") {
    impl = std::make_shared<cpsflow::LinearRegressionLearner>();
  } else if (learner == "tree") {
    impl = std::make_shared<cpsflow::RegressionTreeLearner>(cpsflow::TreeParams{max_depth, 1});
  } else if (learner == "mean") {
    impl = std::make_shared<cpsflow::MeanLearner>();
  } else {
    return emit_error("InvalidArgument", "cli", "unknown learner '" + learner + "'", "--learner");
  }

  // Block termination signals before any server thread exists so that only
  // sigwait below sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto server = cpsflow::serve(impl, listen, max_sessions);
  std::cout << "listening on " << server->address() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server->stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpsflow: data-driven modeling pipelines for cyber-physical systems"};
  app.require_subcommand(1);

  std::string config, out = ".", learner = "tree", serve_learner = "linear", listen, model_path, input, output;
  std::uint64_t seed = 0;
  std::size_t max_depth = 5, max_sessions = 4;

  auto* run = app.add_subcommand("run", "Run a pipeline config");
  run->add_option("config", config, "Pipeline config (JSON)")->required();
  run->add_option("--out", out, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");

  auto* tank = app.add_subcommand("watertank", "Run the built-in water-tank scenario");
  tank->add_option("--learner", learner, "tree | linear | incremental_linear");
  tank->add_option("--max-depth", max_depth, "Tree depth");
  tank->add_option("--out", out, "Output directory");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config, "Pipeline config (JSON)")->required();

  auto* serve = app.add_subcommand("serve-learner", "Serve a learner over TCP");
  serve->add_option("--listen", listen, "host:port")->required();
  serve->add_option("--max-sessions", max_sessions, "Concurrent sessions")->check(CLI::PositiveNumber);
  serve->add_option("--learner", serve_learner, "linear | tree | mean");
  serve->add_option("--max-depth", max_depth, "Tree depth");

  auto* predict = app.add_subcommand("predict", "Predict with a saved model file");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--input", input, "Input CSV")->required();
  predict->add_option("--out", output, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("InvalidArgument", "cli", e.what());
  }

  try {
    if (*run) return cmd_run(config, out, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (*tank) return cmd_watertank(learner, max_depth, out);
    if (*validate) return cmd_validate(config);
    if (*serve) return cmd_serve(listen, max_sessions, serve_learner, max_depth);
    if (*predict) return cmd_predict(model_path, input, output);
  } catch (const cpsflow::ConfigError& e) {
    return emit_error(std::string(cpsflow::to_string(e.code())), e.module(), e.what(), e.field());
  } catch (const cpsflow::Error& e) {
    return emit_error(std::string(cpsflow::to_string(e.code())), e.module(), e.what());
  } catch (const std::exception& e) {
    return emit_error("InternalError", "cli", e.what());
  }
  return 0;
}
