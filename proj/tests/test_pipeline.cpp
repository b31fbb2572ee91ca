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


#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cpsflow/io.hpp"
#include "cpsflow/pipeline.hpp"
#include "support.hpp"

using namespace cpsflow;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(CPSFLOW_SOURCE_DIR) / "configs";

Json minimal_csv_config(const std::string& path) {
  return Json{{"environment", {{"kind", "csv"}, {"path", path}}},
              {"io", {{"inputs", {"x"}}, {"outputs", {"y"}}}},
              {"learner", {{"kind", "linear"}}},
              {"metrics", {"mae"}}};
}

bool has_field(const std::vector<Diagnostic>& diags, const std::string& field) {
  for (const auto& d : diags) {
    if (d.field == field) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("bundled configs validate") {
  for (const char* name : {"watertank.json", "watertank_incremental.json", "watertank_active.json"}) {
    CAPTURE(name);
    const Json doc = Json::parse(read_file(kConfigs / name));
    CHECK(validate_config(doc, kConfigs).empty());
  }
  CHECK(load_config(kConfigs / "watertank.json").strategy() == StrategyKind::Offline);
  CHECK(load_config(kConfigs / "watertank_incremental.json").strategy() == StrategyKind::Incremental);
  CHECK(load_config(kConfigs / "watertank_active.json").strategy() == StrategyKind::Active);
}

TEST_CASE("unknown transform kind names the field") {
  Json doc = watertank_config_json();
  doc["transforms"][0]["kind"] = "fourier";
  try {
    parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(e.field() == "transforms[0].kind");
  }
}

TEST_CASE("validation collects every problem") {
  Json doc = watertank_config_json();
  doc["split"] = 1.5;
  doc["learner"]["max_depth"] = -2;
  doc["metrics"] = {"mae", "mae", "wobble"};
  doc["colour"] = "blue";
  doc["io"]["outputs"] = {"x_2", "V_2"};
  const auto diags = validate_config(doc);
  CHECK(has_field(diags, "split"));
  CHECK(has_field(diags, "learner.max_depth"));
  CHECK(has_field(diags, "metrics[1]"));
  CHECK(has_field(diags, "metrics[2]"));
  CHECK(has_field(diags, "colour"));
  CHECK(has_field(diags, "io.outputs"));
}

TEST_CASE("cross-field rules") {
  Json active = Json::parse(read_file(kConfigs / "watertank_active.json"));
  active.erase("seed");
  CHECK(has_field(validate_config(active), "seed"));

  Json mixed = watertank_config_json();
  mixed["learner"] = {{"kind", "active_rls"}};
  CHECK(has_field(validate_config(mixed), "learner.kind"));

  Json output = watertank_config_json();
  output["output"] = {{"report", "same.json"}, {"model", "same.json"}};
  CHECK(has_field(validate_config(output), "output.model"));

  CHECK(has_field(validate_config(minimal_csv_config("does/not/exist.csv"), "/tmp"), "environment.path"));
}

TEST_CASE("watertank scenario shape and quality") {
  const auto result = run_pipeline(watertank_config());
  CHECK(result.raw_rows == 250);
  CHECK(result.transformed_rows == 248);
  CHECK(result.train_rows == 198);
  CHECK(result.eval_rows == 50);
  CHECK(result.report.rows == 50);
  CHECK(result.report.metric("mae") <= 0.06);
  CHECK(result.report.metric("mse") <= 0.005);
  CHECK(result.model->kind() == "regression_tree");

  std::vector<std::string> inputs;
  for (const auto& f : result.model->input_schema()) inputs.push_back(f.name);
  CHECK(inputs == std::vector<std::string>{"V_0", "x_0", "V_1", "x_1", "V_2"});
  CHECK(result.model->output_schema().front().name == "x_2");
}

TEST_CASE("scenario equals the explicit config file") {
  const auto builtin = run_pipeline(watertank_config());
  const auto from_file = run_pipeline(load_config(kConfigs / "watertank.json"));
  CHECK(builtin.report.to_json().dump(2) == from_file.report.to_json().dump(2));
  CHECK(builtin.model->to_document() == from_file.model->to_document());
}

TEST_CASE("swapping only the learner entry changes the report") {
  const Json tree = Json::parse(read_file(kConfigs / "watertank.json"));
  const Json incremental = Json::parse(read_file(kConfigs / "watertank_incremental.json"));
  const Json diff = Json::diff(tree, incremental);
  for (const auto& op : diff) CHECK(op.at("path").get<std::string>().rfind("/learner", 0) == 0);

  const auto a = run_pipeline(parse_config(tree));
  const auto b = run_pipeline(parse_config(incremental));
  CHECK(b.model->kind() == "linear");
  CHECK(a.report.to_json() != b.report.to_json());
  CHECK(std::isfinite(b.report.metric("mae")));
}

TEST_CASE("active config learns the tank") {
  const auto cfg = load_config(kConfigs / "watertank_active.json");
  const auto first = run_pipeline(cfg);
  const auto second = run_pipeline(cfg);
  CHECK(first.train_rows == cfg.environment.step_budget);
  CHECK(first.eval_rows == cfg.environment.eval_steps);
  CHECK(first.report.to_json() == second.report.to_json());
  CHECK(first.report.metric("mae") < 0.05);

  auto reseeded = cfg;
  reseeded.seed = 12345;
  CHECK(run_pipeline(reseeded).model->to_document() != first.model->to_document());
}

TEST_CASE("csv config resolves data relative to the config file") {
  const auto dir = testing::temp_dir("pipeline_csv");
  std::string csv = "x,y\n";
  for (int i = 0; i < 20; ++i) csv += std::to_string(i) + "," + std::to_string(3 * i - 2) + "\n";
  write_file(dir / "data.csv", csv);
  Json doc = minimal_csv_config("data.csv");
  doc["transforms"] = Json::array({{{"kind", "standardize"}, {"columns", {"x"}}}});
  write_file(dir / "config.json", doc.dump());

  const auto cfg = load_config(dir / "config.json");
  const auto result = run_and_write(cfg, dir / "out");
  CHECK(result.train_rows == 16);
  CHECK(result.report.metric("mae") < 1e-9);
  CHECK(fs::exists(dir / "out" / "report.json"));
  const auto model = load_model(dir / "out" / "model.fcm.json");
  CHECK(model->kind() == "linear");
  fs::remove_all(dir);
}

TEST_CASE("passive transitions follow the sine inflow") {
  const auto t = passive_transitions(WaterTankParams{}, 1.0, 0.1, 1e-3, 30);
  CHECK(t.row_count() == 30);
  const auto x = testing::col(t, "x"), next = testing::col(t, "x_next"), v = testing::col(t, "action");
  for (std::size_t k = 0; k + 1 < x.size(); ++k) CHECK(next[k] == x[k + 1]);
  for (double a : v) CHECK((a >= 0.0 && a <= 1.0));
}
