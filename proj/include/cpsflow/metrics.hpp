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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpsflow::metrics {

using Values = std::span<const double>;

double mae(Values predicted, Values actual);
double mse(Values predicted, Values actual);
double max_error(Values predicted, Values actual);
/// Throws ConstantActuals when the actuals have zero variance and the
/// predictions are not exactly equal to them.
double r2(Values predicted, Values actual);

/// Classification scores. `zero_division` is set when the score's
/// denominator was empty and 0 was returned in its place.
struct Score {
  double value = 0.0;
  bool zero_division = false;
};

double accuracy(Values predicted, Values actual);
Score precision(Values predicted, Values actual);
Score recall(Values predicted, Values actual);
Score f_beta(Values predicted, Values actual, double beta = 1.0);

/// Metric selected by name: mae, mse, max_error, r2, accuracy, precision,
/// recall, f_beta.
struct MetricSpec {
  std::string name;
  double beta = 1.0;

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

bool is_known_metric(std::string_view name);
const std::vector<std::string>& known_metrics();

Score compute(const MetricSpec& spec, Values predicted, Values actual);

}  // namespace cpsflow::metrics
