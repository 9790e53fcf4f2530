// Copyright 2026 The Darling Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "darling/error.h"

namespace darling {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kUnknownDemographicValue:
      return "UnknownDemographicValue";
    case ErrorCode::kTypeViolation:
      return "TypeViolation";
    case ErrorCode::kDuplicateQuadruple:
      return "DuplicateQuadruple";
    case ErrorCode::kInfeasibleSplit:
      return "InfeasibleSplit";
    case ErrorCode::kUnknownGender:
      return "UnknownGender";
    case ErrorCode::kEmptyCorpus:
      return "EmptyCorpus";
    case ErrorCode::kNonUnitNormal:
      return "NonUnitNormal";
    case ErrorCode::kMissingDemo:
      return "MissingDemo";
    case ErrorCode::kEmptyMask:
      return "EmptyMask";
    case ErrorCode::kCheckpointMismatch:
      return "CheckpointMismatch";
    case ErrorCode::kExhaustedSampler:
      return "ExhaustedSampler";
    case ErrorCode::kNonFiniteLoss:
      return "NonFiniteLoss";
    case ErrorCode::kTrueTailMissing:
      return "TrueTailMissing";
    case ErrorCode::kUnknownDisease:
      return "UnknownDisease";
    case ErrorCode::kUnseenDemographicSet:
      return "UnseenDemographicSet";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace darling
