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

#include "cpsflow/environments.hpp"
#include "support.hpp"

using namespace cpsflow;
using testing::make_dataset;

namespace {

Dataset tank_table() { return make_dataset({"V", "x"}, {{1, 2, 3, 4, 5}, {10, 20, 30, 40, 50}}); }

}  // namespace

TEST_CASE("offline observation") {
  DatasetEnvironment plain(tank_table());
  CHECK(plain.observe() == tank_table());
  CHECK(plain.observe() == plain.observe());

  DatasetEnvironment windowed(tank_table());
  windowed.attach(sliding_window(3));
  CHECK(windowed.observe().row_count() == 3);
  CHECK(windowed.observe().names() == std::vector<std::string>{"V_0", "x_0", "V_1", "x_1", "V_2", "x_2"});

  CsvEnvironment missing("/nonexistent/data.csv");
  CHECK(testing::error_code_of([&] { missing.observe(); }) == ErrorCode::FileNotFound);
}

TEST_CASE("attached transforms run in attachment order") {
  DatasetEnvironment env(tank_table());
  env.attach(sliding_window(2));
  env.attach(select({"x_1"}));
  CHECK(env.observe() == make_dataset({"x_1"}, {{20, 30, 40, 50}}));
}

TEST_CASE("file-backed environments") {
  const auto dir = testing::temp_dir("env");
  write_csv(tank_table(), dir / "f.csv");
  write_file(dir / "f.json", dataset_to_json(tank_table()).dump());
  CsvEnvironment csv(dir / "f.csv");
  JsonEnvironment json(dir / "f.json");
  CHECK(csv.observe() == tank_table());
  CHECK(testing::col(json.observe(), "x") == testing::col(tank_table(), "x"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("replay batches") {
  testing::Rng rng(31);
  const Dataset d = testing::random_dataset(rng, 10, 2);
  ReplayEnvironment env(d, 4);
  std::vector<std::size_t> sizes;
  while (auto b = env.next_batch()) sizes.push_back(b->row_count());
  CHECK(sizes == std::vector<std::size_t>{4, 4, 2});
  CHECK(env.exhausted());
  CHECK_FALSE(env.next_batch().has_value());
  CHECK_FALSE(env.next_batch().has_value());
  CHECK(env.batches_served() == 3);

  ReplayEnvironment ones(testing::random_dataset(rng, 3, 1), 1);
  int n = 0;
  while (auto b = ones.next_batch()) n += b->row_count() == 1;
  CHECK(n == 3);
  CHECK(testing::error_code_of([&] { ReplayEnvironment(d, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("property: replay batches concatenate to the source") {
  testing::Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = rng.between(1, 40);
    const std::size_t batch = rng.between(1, 12);
    const Dataset d = testing::random_dataset(rng, rows, rng.between(1, 3));
    ReplayEnvironment env(d, batch);
    Dataset acc = *env.next_batch();
    while (auto b = env.next_batch()) {
      CHECK(b->row_count() >= 1);
      CHECK(b->row_count() <= batch);
      acc = Dataset::concat_rows(acc, *b);
    }
    CHECK(acc == d);
  }
}

TEST_CASE("active water tank") {
  WaterTankActiveEnvironment env;
  CHECK(env.observe() == make_dataset({"t", "x"}, {{0.0}, {1.0}}));
  CHECK(env.observe() == env.observe());

  env.act(0.0);
  env.advance();
  const Dataset after = env.observe();
  CHECK(testing::col(after, "x")[0] < 1.0);
  CHECK(testing::col(after, "t")[0] == doctest::Approx(0.1));

  CHECK(testing::error_code_of([&] { env.act(1.5); }) == ErrorCode::ActionOutOfRange);
  CHECK(testing::error_code_of([&] { env.act(-0.1); }) == ErrorCode::ActionOutOfRange);
  CHECK(testing::error_code_of([&] { env.act(NAN); }) == ErrorCode::ActionOutOfRange);
}

TEST_CASE("active tank: default action is zero and time strictly increases") {
  WaterTankActiveEnvironment a, b;
  a.advance();
  b.act(0.0);
  b.advance();
  CHECK(a.observe() == b.observe());

  WaterTankActiveEnvironment env;
  double last = env.time();
  for (int k = 0; k < 50; ++k) {
    env.act(k % 2 ? 1.0 : 0.0);
    env.advance();
    CHECK(env.time() > last);
    CHECK(env.level() >= 0.0);
    last = env.time();
  }
}

TEST_CASE("active tank: full inflow raises the level") {
  WaterTankActiveEnvironment env;
  env.act(1.0);
  env.advance();
  CHECK(env.level() > 1.0);
  // The pending action is consumed; the next advance drains again.
  const double high = env.level();
  env.advance();
  CHECK(env.level() < high);
}
