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

#ifndef DARLING_CHECKPOINT_H_
#define DARLING_CHECKPOINT_H_

#include <string>
#include <string_view>

#include "darling/kg.h"
#include "darling/model.h"

namespace darling {

// Everything needed to score or recommend without the training data: model
// config, the vocabulary the ids refer to, and all parameter tables.
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  EmbeddingStore store;
};

// Line-oriented text; doubles are written with 17 significant digits so a
// save/load cycle is bit-exact.
std::string SerializeCheckpoint(const Checkpoint& checkpoint);

// Verifies the recorded vocabulary hash and every table shape against the
// recorded dimension; throws kCheckpointMismatch on disagreement.
Checkpoint ParseCheckpoint(std::string_view text);

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint);

// When `expected_vocab` is given its hash must equal the checkpoint's.
Checkpoint LoadCheckpoint(const std::string& path,
                          const Vocabulary* expected_vocab = nullptr);

// Flat "key=value" lines for the model config; shared with the CLI's
// provenance echo.
std::string FormatModelConfig(const ModelConfig& config);
void ApplyModelConfigKey(ModelConfig& config, std::string_view key,
                         std::string_view value);

}  // namespace darling

#endif  // DARLING_CHECKPOINT_H_
