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

// Generators, reference oracles and instrumented environments shared by the
// unit tests and the acceptance binary. Oracles here never call into the
// library code they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "cpsflow/dataset.hpp"
#include "cpsflow/environments.hpp"
#include "cpsflow/error.hpp"
#include "cpsflow/transforms.hpp"

namespace testing {

using cpsflow::Column;
using cpsflow::Dataset;

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine);
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64 engine;
};

inline std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -10.0, double hi = 10.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Values drawn from a small set, so duplicates and ties are common.
inline std::vector<double> coarse_values(Rng& rng, std::size_t n, int levels = 5) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.index(static_cast<std::size_t>(levels)));
  return v;
}

inline std::vector<double> random_binary(Rng& rng, std::size_t n, double p = 0.5) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.coin(p) ? 1.0 : 0.0;
  return v;
}

inline Dataset make_dataset(const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols) {
  std::vector<Dataset::Entry> entries;
  for (std::size_t i = 0; i < names.size(); ++i) entries.emplace_back(names[i], Column(cols[i]));
  return Dataset(std::move(entries));
}

inline Dataset random_dataset(Rng& rng, std::size_t rows, std::size_t cols, const std::string& prefix = "f") {
  std::vector<std::string> names;
  std::vector<std::vector<double>> data;
  for (std::size_t j = 0; j < cols; ++j) {
    names.push_back(prefix + std::to_string(j));
    data.push_back(random_values(rng, rows));
  }
  return make_dataset(names, data);
}

inline std::vector<double> col(const Dataset& d, const std::string& name) { return d.column(name).to_float64(); }

template <typename Fn>
cpsflow::ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const cpsflow::Error& e) {
    return e.code();
  }
  return cpsflow::ErrorCode::IoError;  // sentinel: nothing thrown
}

// ---------------------------------------------------------------------------
// Naive metric references: one left-to-right loop each.

namespace oracle {

inline double mae(const std::vector<double>& p, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - a[i]);
  return s / static_cast<double>(p.size());
}

inline double mse(const std::vector<double>& p, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - a[i]) * (p[i] - a[i]);
  return s / static_cast<double>(p.size());
}

inline double max_error(const std::vector<double>& p, const std::vector<double>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::fabs(p[i] - a[i]) > m) m = std::fabs(p[i] - a[i]);
  }
  return m;
}

inline double r2(const std::vector<double>& p, const std::vector<double>& a) {
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double res = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    res += (a[i] - p[i]) * (a[i] - p[i]);
    tot += (a[i] - mean) * (a[i] - mean);
  }
  return 1.0 - res / tot;
}

struct Counts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Counts counts(const std::vector<double>& p, const std::vector<double>& a) {
  Counts c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pp = p[i] == 1.0, aa = a[i] == 1.0;
    c.tp += pp && aa;
    c.fp += pp && !aa;
    c.fn += !pp && aa;
    c.tn += !pp && !aa;
  }
  return c;
}

inline double accuracy(const std::vector<double>& p, const std::vector<double>& a) {
  const Counts c = counts(p, a);
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(p.size());
}

inline double precision(const std::vector<double>& p, const std::vector<double>& a) {
  const Counts c = counts(p, a);
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

inline double recall(const std::vector<double>& p, const std::vector<double>& a) {
  const Counts c = counts(p, a);
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

inline double f_beta(const std::vector<double>& p, const std::vector<double>& a, double beta) {
  const double pr = precision(p, a), rc = recall(p, a);
  if (pr == 0.0 && rc == 0.0) return 0.0;
  return (1.0 + beta * beta) * pr * rc / (beta * beta * pr + rc);
}

// ---------------------------------------------------------------------------
// Exhaustive best stump: every feature, every midpoint between consecutive
// distinct values, children scored by direct sum of squared deviations.

struct Stump {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
  double left_mean = 0.0;
  double right_mean = 0.0;
  bool unique = true;  // no other candidate within the tie tolerance
};

inline double sse_of(const std::vector<double>& v, double& mean) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

inline Stump best_stump(const std::vector<std::vector<double>>& features, const std::vector<double>& y,
                        std::size_t min_leaf = 1) {
  Stump best;
  std::vector<double> sses;
  for (std::size_t f = 0; f < features.size(); ++f) {
    std::vector<double> values = features[f];
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double t = 0.5 * (values[k] + values[k + 1]);
      if (t >= values[k + 1]) t = values[k];
      std::vector<double> left, right;
      for (std::size_t i = 0; i < y.size(); ++i) (features[f][i] <= t ? left : right).push_back(y[i]);
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      double lm = 0.0, rm = 0.0;
      const double s = sse_of(left, lm) + sse_of(right, rm);
      sses.push_back(s);
      if (s < best.sse) best = {true, f, t, s, lm, rm, true};
    }
  }
  const double tol = 1e-9 * std::max(1.0, best.sse);
  std::size_t near = 0;
  for (double s : sses) near += std::fabs(s - best.sse) <= tol;
  best.unique = near == 1;
  return best;
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Instrumented environments.

class CountingOfflineEnvironment final : public cpsflow::OfflineEnvironment {
 public:
  explicit CountingOfflineEnvironment(Dataset data) : data_(std::move(data)) {}
  std::size_t loads = 0;

 protected:
  Dataset load() override {
    ++loads;
    return data_;
  }

 private:
  Dataset data_;
};

class CountingIncrementalEnvironment final : public cpsflow::IncrementalEnvironment {
 public:
  CountingIncrementalEnvironment(Dataset data, std::size_t batch) : data_(std::move(data)), batch_(batch) {}

  std::optional<Dataset> next_batch() override {
    ++calls;
    if (cursor_ >= data_.row_count()) return std::nullopt;
    const std::size_t end = std::min(cursor_ + batch_, data_.row_count());
    Dataset out = data_.slice_rows(cursor_, end);
    served.push_back(cursor_);
    cursor_ = end;
    return out;
  }
  bool exhausted() const override { return cursor_ >= data_.row_count(); }

  std::size_t calls = 0;
  std::vector<std::size_t> served;  // start row of each batch handed out

 private:
  Dataset data_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
};

/// Toy plant x' = 0.9 x + action recording every interaction.
class CountingActiveEnvironment final : public cpsflow::ActiveEnvironment {
 public:
  cpsflow::ActionSpace action_space() const override { return {0.0, 1.0}; }
  void act(double a) override {
    if (!action_space().contains(a)) throw cpsflow::Error(cpsflow::ErrorCode::ActionOutOfRange, "test", "range");
    ++acts;
    log.push_back('a');
    pending_ = a;
  }
  void advance() override {
    ++advances;
    log.push_back('v');
    x_ = 0.9 * x_ + pending_;
    pending_ = 0.0;
    t_ += 1.0;
  }
  Dataset observe() const override {
    ++observes;
    return make_dataset({"t", "x"}, {{t_}, {x_}});
  }
  double time() const override { return t_; }

  std::size_t acts = 0;
  std::size_t advances = 0;
  mutable std::size_t observes = 0;
  std::string log;

 private:
  double x_ = 1.0;
  double t_ = 0.0;
  double pending_ = 0.0;
};

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cpsflow_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
