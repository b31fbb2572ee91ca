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

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cpsflow {

struct OdeState {
  double time = 0.0;
  std::vector<double> x;
};

/// Right-hand side of an autonomous-in-structure ODE x' = f(t, x), plus the
/// quantities recorded for each output sample.
class OdeSystem {
 public:
  virtual ~OdeSystem() = default;

  virtual std::vector<double> derivative(double t, std::span<const double> x) const = 0;
  /// Maps a raw integrator result back onto the admissible state set.
  virtual void project(std::span<double>) const {}

  virtual std::vector<std::string> sample_names() const = 0;
  virtual std::vector<double> sample(const OdeState& state) const = 0;
};

using InflowFn = std::function<double(double)>;

struct WaterTankParams {
  double area = 5.0;         // A
  double outflow = 0.5;      // a
  double inflow_gain = 2.0;  // b
};

/// max(0, sin(2*pi*t/10))
double sine_inflow(double t);

/// Single tank: x' = (b V(t) - a sqrt(x)) / A with the level kept at x >= 0.
class WaterTank final : public OdeSystem {
 public:
  explicit WaterTank(WaterTankParams params = {}, InflowFn inflow = sine_inflow);

  std::vector<double> derivative(double t, std::span<const double> x) const override;
  void project(std::span<double> x) const override;

  /// Columns t, V, x.
  std::vector<std::string> sample_names() const override;
  std::vector<double> sample(const OdeState& state) const override;

  const WaterTankParams& params() const { return params_; }
  double inflow(double t) const { return inflow_(t); }

 private:
  WaterTankParams params_;
  InflowFn inflow_;
};

/// One classical fourth-order Runge-Kutta step. Throws NonFiniteState.
OdeState integrate_step(const OdeSystem& system, const OdeState& state, double dt);

/// Advances by `duration` using equal substeps no longer than `max_substep`.
OdeState integrate(const OdeSystem& system, const OdeState& state, double duration, double max_substep);

}  // namespace cpsflow
