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

#include "cpsflow/error.hpp"

namespace cpsflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::InconsistentKeys: return "InconsistentKeys";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::DuplicateColumn: return "DuplicateColumn";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ActionOutOfRange: return "ActionOutOfRange";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NotAListColumn: return "NotAListColumn";
    case ErrorCode::RaggedListLengths: return "RaggedListLengths";
    case ErrorCode::WindowLargerThanData: return "WindowLargerThanData";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NeverUpdated: return "NeverUpdated";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConstantActuals: return "ConstantActuals";
    case ErrorCode::NonBinaryValue: return "NonBinaryValue";
    case ErrorCode::ConnectFailed: return "ConnectFailed";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ConnectionClosed: return "ConnectionClosed";
    case ErrorCode::RemoteError: return "RemoteError";
    case ErrorCode::BindFailed: return "BindFailed";
    case ErrorCode::FrameTooLarge: return "FrameTooLarge";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cpsflow
