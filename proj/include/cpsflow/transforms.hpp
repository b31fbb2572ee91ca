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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpsflow/dataset.hpp"
#include "cpsflow/io.hpp"

namespace cpsflow {

class Transform;
using TransformPtr = std::shared_ptr<const Transform>;

/// A Dataset -> Dataset mapping. Instances are immutable: fitting an adaptive
/// transform yields a new, fitted instance.
class Transform {
 public:
  virtual ~Transform() = default;

  virtual std::string kind() const = 0;
  virtual Dataset apply(const Dataset& data) const = 0;

  virtual bool is_adaptive() const { return false; }
  virtual bool is_fitted() const { return true; }
  /// Fitted copy of this transform. Non-adaptive transforms return nullptr,
  /// meaning "use as is".
  virtual TransformPtr fit(const Dataset& data) const;

  /// Kind tag plus parameters (and fitted state, if any).
  virtual Json to_json() const = 0;
};

TransformPtr select(std::vector<std::string> names);
TransformPtr explode(std::vector<std::string> names);
TransformPtr sliding_window(std::size_t window_size);
/// Unfitted standardization of the named columns.
TransformPtr standardize(std::vector<std::string> names);

struct ColumnStats {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;  // population, divisor N
  bool constant = false;

  friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

inline constexpr double kConstantColumnThreshold = 1e-12;

/// Fitted standardization carrying per-column population moments.
class Standardize final : public Transform {
 public:
  explicit Standardize(std::vector<std::string> names);
  explicit Standardize(std::vector<ColumnStats> fitted);

  std::string kind() const override { return "standardize"; }
  Dataset apply(const Dataset& data) const override;
  bool is_adaptive() const override { return true; }
  bool is_fitted() const override { return stats_.has_value(); }
  TransformPtr fit(const Dataset& data) const override;
  Json to_json() const override;

  const std::vector<std::string>& names() const { return names_; }
  const std::optional<std::vector<ColumnStats>>& stats() const { return stats_; }

 private:
  std::vector<std::string> names_;
  std::optional<std::vector<ColumnStats>> stats_;
};

std::shared_ptr<const Standardize> standardize_fit(std::vector<std::string> names, const Dataset& data);
Dataset standardize_apply(const Transform& fitted, const Dataset& data);

/// Builds a transform from its JSON form ({"kind": ..., params}).
TransformPtr transform_from_json(const Json& spec);

/// Ordered transform list applied first to last.
class TransformChain {
 public:
  TransformChain() = default;
  TransformChain(std::initializer_list<TransformPtr> items) : items_(items) {}
  explicit TransformChain(std::vector<TransformPtr> items) : items_(std::move(items)) {}

  bool empty() const noexcept { return items_.empty(); }
  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<TransformPtr>& items() const noexcept { return items_; }

  TransformChain then(TransformPtr next) const;
  TransformChain then(const TransformChain& next) const;

  /// Pure sequential application; unfitted adaptive members raise NotFitted.
  Dataset apply(const Dataset& data) const;

  /// Fits every unfitted adaptive member on the output of its predecessors.
  TransformChain fit(const Dataset& data) const;

  bool is_fitted() const;
  Json to_json() const;

 private:
  std::vector<TransformPtr> items_;
};

Dataset chain_apply(const TransformChain& chain, const Dataset& data);

}  // namespace cpsflow
