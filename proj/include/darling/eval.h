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

#ifndef DARLING_EVAL_H_
#define DARLING_EVAL_H_

// Tail-ranking link prediction: mean rank and Hits@K per task, the
// demographic-mask x probability-score sensitivity grid, and the baseline
// comparison table.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "darling/kg.h"
#include "darling/model.h"
#include "darling/train.h"

namespace darling {

enum class RankMode { kRaw, kFiltered };

std::string_view RankModeName(RankMode mode);
RankMode ParseRankMode(std::string_view name);

using TripleSet = std::unordered_set<Triple, TripleHash>;

TripleSet KnownTriples(const DatasetSplit& split);
TripleSet KnownTriples(const QuadrupleStore& store);

// Candidate tails per relation: every entity of the relation's tail kind, in
// ascending id order.
std::vector<std::vector<EntityId>> CandidateSets(const Vocabulary& vocab);

// 1 + #candidates scoring strictly lower + #candidates tied with a smaller
// id. Filtered mode drops candidates t' != t with (h, r, t') in `known`.
// Throws kTrueTailMissing when the true tail is not a candidate.
uint64_t RankTail(const ModelConfig& config, const EmbeddingStore& store,
                  const Quadruple& quad, std::span<const EntityId> candidates,
                  RankMode mode, const TripleSet* known);

// Ranks every quad in store order; parallel ranking is exact.
std::vector<uint64_t> RankAll(const ModelConfig& config,
                              const EmbeddingStore& store,
                              const Vocabulary& vocab,
                              const QuadrupleStore& quads, RankMode mode,
                              const TripleSet* known, int threads = 1);

// "Disease-Treatment" for "Disease_to_Treatment"; other names verbatim.
std::string TaskName(std::string_view relation);

struct TaskMetrics {
  std::string task;
  std::string relation;
  std::size_t n = 0;
  double mean_rank = 0.0;
  std::map<int, double> hits;
  double mrr = 0.0;
};

struct RankingReport {
  RankMode mode = RankMode::kRaw;
  // In relation-id order; relations without test quads are omitted.
  std::vector<TaskMetrics> tasks;
  std::size_t n = 0;
  double mean_rank = 0.0;
};

// Aggregates ranks (aligned with quads) into a report.
RankingReport Summarize(const Vocabulary& vocab, const QuadrupleStore& quads,
                        std::span<const uint64_t> ranks,
                        std::span<const int> ks, RankMode mode);

// Throws kInvalidArgument on an empty test store.
RankingReport Evaluate(const ModelConfig& config, const EmbeddingStore& store,
                       const Vocabulary& vocab, const QuadrupleStore& test,
                       const TripleSet& known, std::span<const int> ks,
                       RankMode mode, int threads = 1);

// Mean raw rank over all quads (validation model selection).
double MeanRank(const ModelConfig& config, const EmbeddingStore& store,
                const Vocabulary& vocab, const QuadrupleStore& quads,
                int threads = 1);

// MRR is reported only when requested.
std::string FormatReportJson(const RankingReport& report,
                             bool include_mrr = false);
std::string FormatReportText(const RankingReport& report);

// ---------------------------------------------------------------------------
// Experiments

// One experiment repetition: the seed drives the split ("split" stream) and
// training (TrainConfig::seed).
struct ExperimentSpec {
  SplitRatios ratios;
  std::vector<uint64_t> seeds = {1, 2, 3};
  std::vector<int> ks = {3, 10};
  RankMode mode = RankMode::kRaw;
};

// Median over seeds of each task's metrics.
RankingReport MedianReport(std::span<const RankingReport> reports);

struct SweepCell {
  DemoMask mask;
  bool with_probability = true;
  std::vector<RankingReport> per_seed;
  RankingReport median;
};

struct SweepGrid {
  std::vector<SweepCell> cells;
  std::vector<uint64_t> seeds;
  std::vector<int> ks;
};

// One DARLING model per (mask, probability toggle) cell under identical
// seeds and budgets. Each seed splits the unmasked graph once; every mask
// re-keys that same split, so all cells share their held-out records.
SweepGrid SensitivitySweep(
    const ModelConfig& base, const TrainConfig& train, const Vocabulary& vocab,
    const QuadrupleStore& store, const ExperimentSpec& spec,
    std::span<const DemoMask> masks,
    const std::function<void(const std::string&)>& progress = {});

// Rows "DARLING (<mask>)", columns per task: MR with/without, Hits@K
// with/without for the largest K.
std::string FormatSweepText(const SweepGrid& grid);
std::string FormatSweepJson(const SweepGrid& grid);
std::string FormatSweepCsv(const SweepGrid& grid);

struct Budget {
  std::vector<int> batch_sizes = {128};
  std::vector<double> learning_rates = {1e-3};
};

struct ComparisonRow {
  ModelFamily family = ModelFamily::kDarling;
  struct Choice {
    uint64_t seed = 0;
    int batch_size = 0;
    double learning_rate = 0.0;
    double valid_mean_rank = 0.0;
    RankingReport test;
  };
  std::vector<Choice> per_seed;
  RankingReport median;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<int> ks;
};

// Trains every family over its (batch, lr) grid per seed, keeps the
// configuration with the lowest validation MR, and reports its test
// metrics.
ComparisonTable CompareBaselines(
    const ModelConfig& base, const TrainConfig& train, const Vocabulary& vocab,
    const QuadrupleStore& store, const ExperimentSpec& spec,
    std::span<const ModelFamily> families, const Budget& budget,
    const std::function<void(const std::string&)>& progress = {});

std::string FormatComparisonText(const ComparisonTable& table);
std::string FormatComparisonJson(const ComparisonTable& table);

}  // namespace darling

#endif  // DARLING_EVAL_H_
