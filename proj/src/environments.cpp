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

#include "cpsflow/environments.hpp"

#include <algorithm>
#include <cmath>

#include "cpsflow/error.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "environments";

}  // namespace

Dataset OfflineEnvironment::observe() {
  Dataset raw = load();
  if (attached_.empty()) return raw;
  return attached_.fit(raw).apply(raw);
}

Dataset observe_offline(OfflineEnvironment& env) { return env.observe(); }

OdeEnvironment::OdeEnvironment(std::shared_ptr<const OdeSystem> system, OdeState initial, double dt,
                               std::size_t samples, double substep)
    : system_(std::move(system)), initial_(std::move(initial)), dt_(dt), samples_(samples), substep_(substep) {
  if (!system_) throw Error(ErrorCode::InvalidArgument, kModule, "ODE environment needs a system");
  if (!(dt_ > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "sampling interval must be positive");
  if (!(substep_ > 0.0)) throw Error(ErrorCode::InvalidArgument, kModule, "substep must be positive");
  if (samples_ == 0) throw Error(ErrorCode::InvalidArgument, kModule, "sample count must be at least 1");
}

Dataset OdeEnvironment::sample_trajectory(std::size_t n) const {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, kModule, "sample count must be at least 1");
  const auto names = system_->sample_names();
  std::vector<Column::Float64> values(names.size());
  for (auto& v : values) v.reserve(n);

  OdeState state = initial_;
  system_->project(state.x);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      state = integrate(*system_, state, dt_, substep_);
      // Anchor sample times to the grid instead of accumulating round-off.
      state.time = initial_.time + dt_ * static_cast<double>(k);
    }
    const auto row = system_->sample(state);
    for (std::size_t c = 0; c < names.size(); ++c) values[c].push_back(row[c]);
  }

  std::vector<Dataset::Entry> columns;
  for (std::size_t c = 0; c < names.size(); ++c) columns.emplace_back(names[c], Column(std::move(values[c])));
  return Dataset(std::move(columns), n);
}

ReplayEnvironment::ReplayEnvironment(Dataset data, std::size_t batch_size)
    : data_(std::move(data)), batch_size_(batch_size) {
  if (batch_size_ == 0) throw Error(ErrorCode::InvalidArgument, kModule, "batch size must be positive");
}

std::optional<Dataset> ReplayEnvironment::next_batch() {
  if (exhausted()) return std::nullopt;
  const std::size_t end = std::min(cursor_ + batch_size_, data_.row_count());
  Dataset batch = data_.slice_rows(cursor_, end);
  cursor_ = end;
  ++served_;
  return batch;
}

WaterTankActiveEnvironment::WaterTankActiveEnvironment(WaterTankParams params, double x0, double dt,
                                                       double substep)
    : params_(params), state_{0.0, {std::max(x0, 0.0)}}, dt_(dt), substep_(substep) {
  if (!(dt_ > 0.0) || !(substep_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, kModule, "step sizes must be positive");
  }
}

void WaterTankActiveEnvironment::act(double action) {
  if (!std::isfinite(action) || !action_space().contains(action)) {
    throw Error(ErrorCode::ActionOutOfRange, kModule,
                "inflow " + std::to_string(action) + " outside [0, 1]");
  }
  pending_ = action;
}

void WaterTankActiveEnvironment::advance() {
  const double inflow = pending_.value_or(0.0);
  pending_.reset();
  const WaterTank tank(params_, [inflow](double) { return inflow; });
  state_ = integrate(tank, state_, dt_, substep_);
  ++steps_;
  state_.time = dt_ * static_cast<double>(steps_);
}

Dataset WaterTankActiveEnvironment::observe() const {
  return Dataset({{"t", Column(Column::Float64{state_.time})}, {"x", Column(Column::Float64{state_.x[0]})}});
}

}  // namespace cpsflow
