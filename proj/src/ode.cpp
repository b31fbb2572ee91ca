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

#include "cpsflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "environments";

std::vector<double> axpy(std::span<const double> x, double h, std::span<const double> k) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * k[i];
  return out;
}

}  // namespace

double sine_inflow(double t) { return std::max(0.0, std::sin(2.0 * std::numbers::pi * t / 10.0)); }

WaterTank::WaterTank(WaterTankParams params, InflowFn inflow) : params_(params), inflow_(std::move(inflow)) {
  if (!(params_.area > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "tank area must be positive");
  if (!inflow_) throw Error(ErrorCode::InvalidArgument, kModule, "tank needs an inflow function");
}

std::vector<double> WaterTank::derivative(double t, std::span<const double> x) const {
  const double level = std::max(x[0], 0.0);
  return {(params_.inflow_gain * inflow_(t) - params_.outflow * std::sqrt(level)) / params_.area};
}

void WaterTank::project(std::span<double> x) const { x[0] = std::max(x[0], 0.0); }

std::vector<std::string> WaterTank::sample_names() const { return {"t", "V", "x"}; }

std::vector<double> WaterTank::sample(const OdeState& state) const {
  return {state.time, inflow_(state.time), state.x[0]};
}

OdeState integrate_step(const OdeSystem& system, const OdeState& state, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "step must be positive");
  const double t = state.time;
  const auto& x = state.x;
  const auto k1 = system.derivative(t, x);
  const auto k2 = system.derivative(t + dt / 2, axpy(x, dt / 2, k1));
  const auto k3 = system.derivative(t + dt / 2, axpy(x, dt / 2, k2));
  const auto k4 = system.derivative(t + dt, axpy(x, dt, k3));

  OdeState next{t + dt, std::vector<double>(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    next.x[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  system.project(next.x);
  for (double v : next.x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteState, kModule, "state became non-finite at t=" + std::to_string(next.time));
    }
  }
  return next;
}

OdeState integrate(const OdeSystem& system, const OdeState& state, double duration, double max_substep) {
  if (!(duration > 0.0) || !(max_substep > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, kModule, "duration and substep must be positive");
  }
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(duration / max_substep - 1e-9)));
  const double h = duration / static_cast<double>(steps);
  OdeState current = state;
  for (std::size_t i = 0; i < steps; ++i) {
    current = integrate_step(system, current, h);
    current.time = state.time + h * static_cast<double>(i + 1);
  }
  current.time = state.time + duration;
  return current;
}

}  // namespace cpsflow
