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

#include "cpsflow/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cpsflow/error.hpp"

namespace cpsflow::metrics {

namespace {

const char* const kModule = "metrics";

void check_lengths(Values predicted, Values actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::LengthMismatch, kModule,
                "predicted has " + std::to_string(predicted.size()) + " values, actual has " +
                    std::to_string(actual.size()));
  }
  if (predicted.empty()) throw Error(ErrorCode::EmptyInput, kModule, "metric inputs are empty");
}

struct Confusion {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(Values predicted, Values actual) {
  check_lengths(predicted, actual);
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double p = predicted[i];
    const double a = actual[i];
    if ((p != 0.0 && p != 1.0) || (a != 0.0 && a != 1.0)) {
      throw Error(ErrorCode::NonBinaryValue, kModule, "non-binary value at index " + std::to_string(i));
    }
    if (p == 1.0 && a == 1.0) c.tp += 1;
    else if (p == 1.0) c.fp += 1;
    else if (a == 1.0) c.fn += 1;
    else c.tn += 1;
  }
  return c;
}

Score ratio(double num, double den) {
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

}  // namespace

double mae(Values predicted, Values actual) {
  check_lengths(predicted, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sum += std::fabs(predicted[i] - actual[i]);
  return sum / static_cast<double>(predicted.size());
}

double mse(Values predicted, Values actual) {
  check_lengths(predicted, actual);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

double max_error(Values predicted, Values actual) {
  check_lengths(predicted, actual);
  double worst = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) worst = std::max(worst, std::fabs(predicted[i] - actual[i]));
  return worst;
}

double r2(Values predicted, Values actual) {
  check_lengths(predicted, actual);
  const double n = static_cast<double>(actual.size());
  double sum = 0.0;
  for (double a : actual) sum += a;
  const double mean = sum / n;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double r = actual[i] - predicted[i];
    const double d = actual[i] - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (ss_tot == 0.0) {
    if (ss_res == 0.0) return 1.0;
    throw Error(ErrorCode::ConstantActuals, kModule, "R2 undefined: actual values are constant");
  }
  return 1.0 - ss_res / ss_tot;
}

double accuracy(Values predicted, Values actual) {
  const Confusion c = confusion(predicted, actual);
  return (c.tp + c.tn) / static_cast<double>(predicted.size());
}

Score precision(Values predicted, Values actual) {
  const Confusion c = confusion(predicted, actual);
  return ratio(c.tp, c.tp + c.fp);
}

Score recall(Values predicted, Values actual) {
  const Confusion c = confusion(predicted, actual);
  return ratio(c.tp, c.tp + c.fn);
}

Score f_beta(Values predicted, Values actual, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "beta must be positive");
  const Confusion c = confusion(predicted, actual);
  const Score p = ratio(c.tp, c.tp + c.fp);
  const Score r = ratio(c.tp, c.tp + c.fn);
  const bool warn = p.zero_division || r.zero_division;
  if (p.value == 0.0 && r.value == 0.0) return {0.0, warn};
  const double b2 = beta * beta;
  return {(1.0 + b2) * p.value * r.value / (b2 * p.value + r.value), warn};
}

const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> names{"mae",      "mse",       "max_error", "r2",
                                              "accuracy", "precision", "recall",    "f_beta"};
  return names;
}

bool is_known_metric(std::string_view name) {
  const auto& names = known_metrics();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Score compute(const MetricSpec& spec, Values predicted, Values actual) {
  if (spec.name == "mae") return {mae(predicted, actual)};
  if (spec.name == "mse") return {mse(predicted, actual)};
  if (spec.name == "max_error") return {max_error(predicted, actual)};
  if (spec.name == "r2") return {r2(predicted, actual)};
  if (spec.name == "accuracy") return {accuracy(predicted, actual)};
  if (spec.name == "precision") return precision(predicted, actual);
  if (spec.name == "recall") return recall(predicted, actual);
  if (spec.name == "f_beta") return f_beta(predicted, actual, spec.beta);
  throw Error(ErrorCode::InvalidArgument, kModule, "unknown metric '" + spec.name + "'");
}

}  // namespace cpsflow::metrics
