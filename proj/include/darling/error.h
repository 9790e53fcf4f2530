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

#ifndef DARLING_ERROR_H_
#define DARLING_ERROR_H_

#include <stdexcept>
#include <string>

namespace darling {

// Every failure surfaced by the library carries one of these codes; the CLI
// prints the code name so scripts can match on it.
enum class ErrorCode {
  kInvalidArgument,
  kInvalidConfig,
  kParseError,
  kIoError,
  // kg-core
  kUnknownDemographicValue,
  kTypeViolation,
  kDuplicateQuadruple,
  kInfeasibleSplit,
  // ingest
  kUnknownGender,
  kEmptyCorpus,
  // models
  kNonUnitNormal,
  kMissingDemo,
  kEmptyMask,
  kCheckpointMismatch,
  // training
  kExhaustedSampler,
  kNonFiniteLoss,
  // evaluation / inference
  kTrueTailMissing,
  kUnknownDisease,
  kUnseenDemographicSet,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace darling

#endif  // DARLING_ERROR_H_
