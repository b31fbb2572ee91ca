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

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>

#include "cpsflow/dataset.hpp"
#include "cpsflow/io.hpp"
#include "cpsflow/ode.hpp"
#include "cpsflow/transforms.hpp"

namespace cpsflow {

/// Source observed once as a single batch. Attached transforms run on every
/// observation; unfitted adaptive members are fitted on the observed data.
class OfflineEnvironment {
 public:
  virtual ~OfflineEnvironment() = default;

  Dataset observe();

  void attach(TransformPtr transform) { attached_ = attached_.then(std::move(transform)); }
  void attach(const TransformChain& chain) { attached_ = attached_.then(chain); }
  const TransformChain& attached() const { return attached_; }

 protected:
  virtual Dataset load() = 0;

 private:
  TransformChain attached_;
};

Dataset observe_offline(OfflineEnvironment& env);

class DatasetEnvironment final : public OfflineEnvironment {
 public:
  explicit DatasetEnvironment(Dataset data) : data_(std::move(data)) {}

 protected:
  Dataset load() override { return data_; }

 private:
  Dataset data_;
};

class CsvEnvironment final : public OfflineEnvironment {
 public:
  explicit CsvEnvironment(std::filesystem::path path, CsvOptions options = {})
      : path_(std::move(path)), options_(options) {}

 protected:
  Dataset load() override { return load_csv(path_, options_); }

 private:
  std::filesystem::path path_;
  CsvOptions options_;
};

class JsonEnvironment final : public OfflineEnvironment {
 public:
  explicit JsonEnvironment(std::filesystem::path path) : path_(std::move(path)) {}

 protected:
  Dataset load() override { return load_json(path_); }

 private:
  std::filesystem::path path_;
};

inline constexpr double kDefaultSubstep = 1e-3;

/// Samples an ODE at a fixed output interval; rows at t0, t0+dt, ...
class OdeEnvironment final : public OfflineEnvironment {
 public:
  OdeEnvironment(std::shared_ptr<const OdeSystem> system, OdeState initial, double dt, std::size_t samples,
                 double substep = kDefaultSubstep);

  Dataset sample_trajectory(std::size_t n) const;

  double dt() const { return dt_; }
  double substep() const { return substep_; }

 protected:
  Dataset load() override { return sample_trajectory(samples_); }

 private:
  std::shared_ptr<const OdeSystem> system_;
  OdeState initial_;
  double dt_;
  std::size_t samples_;
  double substep_;
};

/// Stream of batches. Exhaustion is reported as std::nullopt, repeatedly.
class IncrementalEnvironment {
 public:
  virtual ~IncrementalEnvironment() = default;
  virtual std::optional<Dataset> next_batch() = 0;
  virtual bool exhausted() const = 0;
};

/// Batch-wise replay of a stored Dataset; the last batch may be short.
class ReplayEnvironment final : public IncrementalEnvironment {
 public:
  ReplayEnvironment(Dataset data, std::size_t batch_size);

  std::optional<Dataset> next_batch() override;
  bool exhausted() const override { return cursor_ >= data_.row_count(); }

  std::size_t batches_served() const { return served_; }

 private:
  Dataset data_;
  std::size_t batch_size_;
  std::size_t cursor_ = 0;
  std::size_t served_ = 0;
};

struct ActionSpace {
  double low = 0.0;
  double high = 1.0;

  bool contains(double a) const { return a >= low && a <= high; }
};

/// Interactive system: the learner acts, the environment advances.
class ActiveEnvironment {
 public:
  virtual ~ActiveEnvironment() = default;

  virtual ActionSpace action_space() const = 0;
  /// Records the action applied by the next advance(). Throws ActionOutOfRange.
  virtual void act(double action) = 0;
  virtual void advance() = 0;
  /// Single-row Dataset of the current observation; no side effects.
  virtual Dataset observe() const = 0;
  virtual double time() const = 0;
};

/// Water tank driven by a held inflow V in [0, 1]. Observations are {t, x}.
class WaterTankActiveEnvironment final : public ActiveEnvironment {
 public:
  WaterTankActiveEnvironment(WaterTankParams params = {}, double x0 = 1.0, double dt = 0.1,
                             double substep = kDefaultSubstep);

  ActionSpace action_space() const override { return {0.0, 1.0}; }
  void act(double action) override;
  void advance() override;
  Dataset observe() const override;
  double time() const override { return state_.time; }

  double level() const { return state_.x[0]; }

 private:
  WaterTankParams params_;
  OdeState state_;
  double dt_;
  double substep_;
  std::optional<double> pending_;
  std::size_t steps_ = 0;
};

}  // namespace cpsflow
