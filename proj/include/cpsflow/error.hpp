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

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpsflow {

enum class ErrorCode {
  // data
  FileNotFound,
  EmptyFile,
  ParseError,
  RaggedRows,
  InconsistentKeys,
  UnknownColumn,
  DuplicateColumn,
  LengthMismatch,
  TypeMismatch,
  NonFiniteValue,
  InvalidFraction,
  TooFewRows,
  // environments
  ActionOutOfRange,
  NonFiniteState,
  // transforms
  NotAListColumn,
  RaggedListLengths,
  WindowLargerThanData,
  EmptyDataset,
  NotFitted,
  // learners and models
  ShapeMismatch,
  SingularDesign,
  TooFewSamples,
  SchemaMismatch,
  DimensionMismatch,
  NeverUpdated,
  // metrics
  EmptyInput,
  ConstantActuals,
  NonBinaryValue,
  // remote
  ConnectFailed,
  VersionMismatch,
  Timeout,
  ConnectionClosed,
  RemoteError,
  BindFailed,
  FrameTooLarge,
  ProtocolError,
  // general
  InvalidArgument,
  PreconditionViolation,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carried by every failure in the library. `module()` names the
/// subsystem that raised it so that CLI error records can report provenance.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(message), code_(code), module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace cpsflow
