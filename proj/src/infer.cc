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

#include "darling/infer.h"

#include <algorithm>
#include <numeric>

#include "darling/error.h"
#include "darling/ingest.h"
#include "darling/io.h"
#include "json.hpp"

namespace darling {

std::string_view TargetKindName(TargetKind kind) {
  switch (kind) {
    case TargetKind::kTreatment:
      return "treatment";
    case TargetKind::kMedicine:
      return "medicine";
    case TargetKind::kBoth:
      return "both";
  }
  return "both";
}

TargetKind ParseTargetKind(std::string_view name) {
  const std::string n = ToLower(Trim(name));
  if (n == "treatment" || n == "procedure") return TargetKind::kTreatment;
  if (n == "medicine") return TargetKind::kMedicine;
  if (n == "both") return TargetKind::kBoth;
  throw Error(ErrorCode::kInvalidArgument,
              "kind must be treatment, medicine or both, got '" + n + "'");
}

namespace {

int Agreement(const DemographicSet& a, const DemographicSet& b) {
  return (a.gender == b.gender) + (a.age == b.age) +
         (a.ethnicity == b.ethnicity);
}

}  // namespace

std::optional<DemoSetId> ResolveDemoSet(const Checkpoint& checkpoint,
                                        const Query& query,
                                        bool nearest_fallback,
                                        bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  if (!UsesDemographics(checkpoint.config.family)) return std::nullopt;
  const Vocabulary& vocab = checkpoint.vocab;
  const DemographicSet full = BucketDemographics(
      query.gender, query.age_years, query.ethnicity, vocab.scheme());
  const DemographicSet masked = MaskDemoSet(full, checkpoint.config.demo_mask);
  if (auto id = vocab.FindDemoSet(masked)) return id;
  if (!nearest_fallback || vocab.num_demo_sets() == 0) {
    throw Error(ErrorCode::kUnseenDemographicSet,
                "demographic set " + DemoLabel(masked, vocab.scheme()) +
                    " was not seen in training");
  }
  uint32_t best = 0;
  int best_agree = -1;
  for (uint32_t i = 0; i < vocab.num_demo_sets(); ++i) {
    const int a = Agreement(masked, vocab.demo_set(DemoSetId(i)));
    if (a > best_agree) {
      best_agree = a;
      best = i;
    }
  }
  if (used_fallback) *used_fallback = true;
  return DemoSetId(best);
}

Recommendation Recommend(const Checkpoint& checkpoint, const Query& query,
                         const RecommendOptions& options) {
  if (query.k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  }
  const Vocabulary& vocab = checkpoint.vocab;
  const auto disease = vocab.FindEntity(query.disease);
  if (!disease || vocab.entity(*disease).kind != EntityKind::kDisease) {
    throw Error(ErrorCode::kUnknownDisease,
                "disease '" + query.disease + "' is not in the vocabulary");
  }
  Recommendation rec;
  rec.disease = query.disease;
  const auto demo = ResolveDemoSet(
      checkpoint, query, options.nearest_demo_fallback, &rec.used_fallback);
  if (demo) {
    rec.demo = ToTuple(vocab.demo_set(*demo), vocab.scheme());
  } else {
    rec.demo = DemoTuple{"*", "*", "*"};
  }

  std::vector<EntityKind> kinds;
  if (query.kind != TargetKind::kMedicine)
    kinds.push_back(EntityKind::kTreatment);
  if (query.kind != TargetKind::kTreatment)
    kinds.push_back(EntityKind::kMedicine);

  for (const EntityKind kind : kinds) {
    std::optional<RelationId> relation;
    for (uint32_t r = 0; r < vocab.num_relations(); ++r) {
      if (vocab.relation(RelationId(r)).tail_kind == kind) {
        relation = RelationId(r);
        break;
      }
    }
    if (!relation) {
      if (query.kind != TargetKind::kBoth) {
        throw Error(ErrorCode::kInvalidArgument,
                    "checkpoint has no relation towards " +
                        std::string(KindName(kind)));
      }
      continue;
    }
    std::vector<EntityId> candidates;
    for (EntityId c : vocab.EntitiesOfKind(kind)) {
      if (options.exclude_known &&
          options.exclude_known->contains(Triple{*disease, *relation, c})) {
        continue;
      }
      candidates.push_back(c);
    }
    std::vector<double> scores(candidates.size());
    ScoreTails(checkpoint.config, checkpoint.store, *disease, *relation, demo,
               candidates, scores);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] < scores[b];
      return candidates[a].value < candidates[b].value;
    });
    const std::size_t n =
        std::min(order.size(), static_cast<std::size_t>(query.k));
    for (std::size_t i = 0; i < n; ++i) {
      const EntityId c = candidates[order[i]];
      rec.items.push_back({vocab.entity(c).code, kind,
                           vocab.relation(*relation).name, scores[order[i]]});
    }
  }
  return rec;
}

std::string FormatRecommendationJson(const Recommendation& rec) {
  nlohmann::json j;
  j["disease"] = rec.disease;
  j["demographics"] = {{"gender", rec.demo.gender},
                       {"age_group", rec.demo.age_group},
                       {"ethnicity", rec.demo.ethnicity}};
  j["used_fallback"] = rec.used_fallback;
  j["recommendations"] = nlohmann::json::array();
  for (const RecommendedItem& item : rec.items) {
    j["recommendations"].push_back({{"code", item.code},
                                    {"kind", KindName(item.kind)},
                                    {"relation", item.relation},
                                    {"score", item.score}});
  }
  return j.dump(2) + "\n";
}

}  // namespace darling
