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

// Randomized properties shared by the strategy tests and the acceptance
// binary. Each returns an empty string on success or a failure description.

#pragma once

#include <memory>
#include <string>

#include "cpsflow/learners.hpp"
#include "cpsflow/strategies.hpp"
#include "support.hpp"

namespace testing {

struct RandomPipeline {
  Dataset data;
  cpsflow::TransformChain chain;
  cpsflow::IoSpec io;
  std::shared_ptr<const cpsflow::OfflineLearner> learner;
};

/// Random source, chain over {standardize, sliding_window, select}, io over
/// the chain's output columns and a deterministic learner.
inline RandomPipeline random_pipeline(Rng& rng) {
  RandomPipeline p;
  const std::size_t cols = rng.between(2, 4);
  p.data = random_dataset(rng, rng.between(15, 60), cols, "s");

  std::vector<cpsflow::TransformPtr> items;
  std::vector<std::string> names = p.data.names();
  const std::size_t steps = rng.between(1, 3);
  for (std::size_t k = 0; k < steps; ++k) {
    switch (rng.index(3)) {
      case 0: {
        std::vector<std::string> pick;
        for (const auto& n : names) {
          if (rng.coin(0.6)) pick.push_back(n);
        }
        if (pick.empty()) pick.push_back(names.front());
        items.push_back(cpsflow::standardize(pick));
        break;
      }
      case 1: {
        const std::size_t w = rng.between(1, 3);
        items.push_back(cpsflow::sliding_window(w));
        std::vector<std::string> next;
        for (std::size_t j = 0; j < w; ++j) {
          for (const auto& n : names) next.push_back(n + "_" + std::to_string(j));
        }
        names = next;
        break;
      }
      default: {
        if (names.size() <= 2) break;
        std::vector<std::string> keep;
        for (const auto& n : names) {
          if (rng.coin(0.7)) keep.push_back(n);
        }
        if (keep.size() < 2) keep = {names[0], names[1]};
        items.push_back(cpsflow::select(keep));
        names = keep;
      }
    }
  }
  p.chain = cpsflow::TransformChain(std::move(items));

  const std::size_t out = rng.index(names.size());
  p.io.outputs = {names[out]};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i != out && (p.io.inputs.empty() || rng.coin(0.7))) p.io.inputs.push_back(names[i]);
  }
  switch (rng.index(3)) {
    case 0: p.learner = std::make_shared<cpsflow::LinearRegressionLearner>(); break;
    case 1: p.learner = std::make_shared<cpsflow::MeanLearner>(); break;
    default: p.learner = std::make_shared<cpsflow::RegressionTreeLearner>(cpsflow::TreeParams{rng.between(1, 5), 1});
  }
  return p;
}

struct Outcome {
  bool compared = false;  // false when both paths failed identically
  std::string failure;
};

/// Transforms attached to the environment vs passed to the strategy.
inline Outcome check_pipeline_equivalence(Rng& rng) {
  const RandomPipeline p = random_pipeline(rng);
  cpsflow::DatasetEnvironment attached(p.data);
  attached.attach(p.chain);
  cpsflow::DatasetEnvironment plain(p.data);

  cpsflow::ModelPtr a, b;
  try {
    a = cpsflow::learn_offline(attached, cpsflow::TransformChain{}, p.io, *p.learner);
    b = cpsflow::learn_offline(plain, p.chain, p.io, *p.learner);
  } catch (const cpsflow::Error& e) {
    // Some random problems are legitimately unsolvable (e.g. singular OLS);
    // both paths must then fail the same way.
    try {
      cpsflow::DatasetEnvironment plain2(p.data);
      cpsflow::learn_offline(plain2, p.chain, p.io, *p.learner);
    } catch (const cpsflow::Error& e2) {
      if (e2.code() == e.code()) return {};
    }
    return {false, std::string("paths disagree on failure: ") + e.what()};
  }

  const Dataset probe = p.chain.fit(p.data).apply(p.data).select(p.io.inputs);
  if (!(a->predict(probe) == b->predict(probe))) return {true, "predictions differ"};
  if (a->to_document() != b->to_document()) return {true, "model parameters differ"};
  return {true, {}};
}

/// Offline observes once, incremental consumes each batch once and in
/// order, active performs exactly step_budget act/advance pairs.
inline std::string check_loop_counts(Rng& rng) {
  const std::size_t rows = rng.between(5, 60);
  const Dataset data = random_dataset(rng, rows, 3);
  const cpsflow::IoSpec io{{"f0", "f1"}, {"f2"}};

  CountingOfflineEnvironment offline(data);
  cpsflow::learn_offline(offline, cpsflow::TransformChain{}, io, cpsflow::MeanLearner{});
  if (offline.loads != 1) return "offline observed " + std::to_string(offline.loads) + " times";

  const std::size_t batch = rng.between(1, 10);
  CountingIncrementalEnvironment stream(data, batch);
  cpsflow::IncrementalLinearLearner learner;
  cpsflow::learn_incremental(stream, cpsflow::TransformChain{}, io, learner);
  const std::size_t expected = (rows + batch - 1) / batch;
  if (learner.batches() != expected || stream.served.size() != expected) return "incremental batch count mismatch";
  for (std::size_t k = 0; k < stream.served.size(); ++k) {
    if (stream.served[k] != k * batch) return "incremental batches out of order";
  }
  if (stream.calls != expected + 1) return "incremental polled past exhaustion";

  const std::size_t budget = rng.between(1, 40);
  CountingActiveEnvironment active;
  cpsflow::ActivePolicyParams params;
  params.seed = rng.engine();
  cpsflow::ActivePolicy policy(active.action_space(), params);
  cpsflow::learn_active(active, policy, budget);
  if (active.acts != budget || active.advances != budget) return "active act/advance count mismatch";
  for (std::size_t k = 0; k < budget; ++k) {
    if (active.log.substr(2 * k, 2) != "av") return "act and advance not paired";
  }
  if (active.observes != 2 * budget) return "active observe count mismatch";
  if (policy.transitions() != budget) return "active learn count mismatch";
  return {};
}

}  // namespace testing
