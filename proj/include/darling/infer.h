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

#ifndef DARLING_INFER_H_
#define DARLING_INFER_H_

// Top-k treatment and medicine recommendation for a patient query.

#include <optional>
#include <string>
#include <vector>

#include "darling/checkpoint.h"
#include "darling/eval.h"
#include "darling/kg.h"

namespace darling {

enum class TargetKind { kTreatment, kMedicine, kBoth };

std::string_view TargetKindName(TargetKind kind);
TargetKind ParseTargetKind(std::string_view name);

struct Query {
  std::string gender;
  int age_years = 0;
  std::string ethnicity;
  std::string disease;
  int k = 10;
  TargetKind kind = TargetKind::kBoth;
};

struct RecommendOptions {
  // Substitute the closest seen demographic set for an unseen one.
  bool nearest_demo_fallback = false;
  // Drop candidates t with (disease, r, t) in this set.
  const TripleSet* exclude_known = nullptr;
};

struct RecommendedItem {
  std::string code;
  EntityKind kind = EntityKind::kTreatment;
  std::string relation;
  double score = 0.0;
};

struct Recommendation {
  std::string disease;
  // Demographic set actually used, after masking and any fallback.
  DemoTuple demo;
  bool used_fallback = false;
  // Ascending score per kind, treatments first.
  std::vector<RecommendedItem> items;
};

// Demo set id used for `query` under the checkpoint's mask. Throws
// kUnseenDemographicSet unless the fallback is enabled.
std::optional<DemoSetId> ResolveDemoSet(const Checkpoint& checkpoint,
                                        const Query& query,
                                        bool nearest_fallback,
                                        bool* used_fallback = nullptr);

Recommendation Recommend(const Checkpoint& checkpoint, const Query& query,
                         const RecommendOptions& options = {});

std::string FormatRecommendationJson(const Recommendation& rec);

}  // namespace darling

#endif  // DARLING_INFER_H_
