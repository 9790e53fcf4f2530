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

#ifndef DARLING_TRAIN_H_
#define DARLING_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "darling/kg.h"
#include "darling/model.h"
#include "darling/rng.h"

namespace darling {

struct TrainConfig {
  int batch_size = 128;
  double learning_rate = 1e-3;
  int epochs = 100;
  uint64_t seed = 1;
  int negatives_per_positive = 1;
  // DARLING only; the Pr* families always use the probability score and
  // the other baselines never do.
  bool use_probability_score = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Validation MR is computed every `eval_interval` epochs and at the last.
  int eval_interval = 1;
  // 1 = sequential reference mode.
  int threads = 1;
  int sampler_max_rejections = 1000;

  void Validate() const;
};

enum class Polarity { kPositive, kNegative };

// lambda * ln(1 / max(prob, eps_pos)) for positives, lambda * ln(1 / eps_neg)
// for negatives (prob ignored).
double ProbabilityScore(double prob, Polarity polarity, double lambda,
                        double eps_pos, double eps_neg);

bool UsesProbabilityScore(ModelFamily family, const TrainConfig& train);

// |f_p - f| when `use_probability` holds, else f.
double GScore(const ModelConfig& config, bool use_probability,
              const EmbeddingStore& store, const Triple& triple,
              std::optional<DemoSetId> demo, double prob, Polarity polarity);

struct LossTerm {
  Quadruple positive;
  // Shares the positive's demographic set.
  Triple negative;
  double g_pos = 0.0;
  double g_neg = 0.0;
  // max(0, g_pos - g_neg + margin)
  double hinge = 0.0;
};

struct LossTermGradients {
  LossTerm term;
  // d hinge / d params; empty when the hinge is inactive.
  std::vector<RowGradient> rows;
};

// `positive_prob` is the probability fed to f_p for the positive (the
// quad's own for DARLING, the aggregated triple probability for Pr*).
LossTermGradients ComputeLossTerm(const ModelConfig& config,
                                  bool use_probability,
                                  const EmbeddingStore& store,
                                  const Quadruple& positive,
                                  double positive_prob, const Triple& negative);

// p(h, r, t) summed over demographic sets, capped at 1. Exact when every
// quad's probability has denominator N(h).
std::unordered_map<Triple, double, TripleHash> AggregateTripleProbabilities(
    const QuadrupleStore& store);

struct NegativeSample {
  Triple triple;
  bool corrupted_head = false;
};

// Uniform demographic-agnostic corruption: a fair coin picks head or tail,
// the replacement is uniform over entities of the matching kind, and the
// candidate is rejected while (h', r, t') is a training triple under any
// demographic set.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, const QuadrupleStore& train,
                  int max_rejections = 1000);

  // Throws kExhaustedSampler after max_rejections consecutive rejections.
  NegativeSample Sample(const Quadruple& positive, Rng& rng) const;

 private:
  const Vocabulary& vocab_;
  const QuadrupleStore& train_;
  int max_rejections_;
  std::vector<EntityId> diseases_;
  std::unordered_map<uint32_t, std::vector<EntityId>> tails_by_relation_;
};

// Dense accumulator shaped like an EmbeddingStore that remembers which rows
// were written so clearing and reduction only visit those.
class GradientBuffer {
 public:
  explicit GradientBuffer(const EmbeddingStore& shape);

  void Accumulate(const RowGradient& g, double scale);
  void AddFrom(const GradientBuffer& other);
  void Clear();

  const EmbeddingStore& values() const { return values_; }
  // (table, row) pairs in first-touch order.
  const std::vector<std::pair<ParamTable, uint32_t>>& touched() const {
    return touched_;
  }

 private:
  EmbeddingStore values_;
  std::array<std::vector<uint8_t>, kNumParamTables> flags_;
  std::vector<std::pair<ParamTable, uint32_t>> touched_;
};

// Adam with bias correction. Rows never touched have zero moments and
// receive an exactly zero update, so only ever-touched rows are visited;
// the result equals dense Adam.
class AdamOptimizer {
 public:
  AdamOptimizer(const EmbeddingStore& shape, double beta1, double beta2,
                double eps);

  // Applies one step; returns the rows whose values changed.
  std::vector<std::pair<ParamTable, uint32_t>> Step(EmbeddingStore& store,
                                                    const GradientBuffer& grads,
                                                    double learning_rate);

  int64_t step_count() const { return step_; }

 private:
  double beta1_, beta2_, eps_;
  int64_t step_ = 0;
  EmbeddingStore m_, v_;
  std::array<std::vector<uint8_t>, kNumParamTables> active_;
  std::vector<std::pair<ParamTable, uint32_t>> active_rows_;
};

struct EpochStats {
  double mean_hinge = 0.0;
  std::size_t active_terms = 0;
  std::size_t terms = 0;
};

// One model's training state over a fixed training store.
class Trainer {
 public:
  Trainer(const ModelConfig& config, const TrainConfig& train,
          const Vocabulary& vocab, const QuadrupleStore& train_store,
          EmbeddingStore& store);

  // Shuffles the training quads, walks them in batches, samples negatives,
  // accumulates hinge subgradients and applies Adam. Hyperplane normals that
  // moved are renormalized. Throws kNonFiniteLoss naming the offending ids.
  EpochStats RunEpoch(Rng& rng);

 private:
  double PositiveProbability(const Quadruple& q) const;

  const ModelConfig& config_;
  const TrainConfig& train_;
  const QuadrupleStore& train_store_;
  EmbeddingStore& store_;
  bool use_probability_;
  NegativeSampler sampler_;
  AdamOptimizer adam_;
  std::vector<GradientBuffer> buffers_;
  std::unordered_map<Triple, double, TripleHash> triple_probs_;
};

struct EpochLog {
  int epoch = 0;
  // NaN for epoch 0 (the initial state) and for epochs without evaluation.
  double mean_hinge = 0.0;
  std::size_t active_terms = 0;
  double valid_mean_rank = 0.0;
  double best_valid_mean_rank = 0.0;
  double wall_seconds = 0.0;
};

struct FitResult {
  EmbeddingStore best;
  int best_epoch = 0;
  double best_valid_mean_rank = 0.0;
  double initial_valid_mean_rank = 0.0;
  std::vector<EpochLog> log;
};

// Initializes from the "init" stream of train.seed, trains with the
// "sampling" stream, and keeps the epoch (>= 1) with the lowest validation
// mean rank (raw, same candidate sets as evaluation; earliest wins ties).
FitResult Fit(const ModelConfig& config, const TrainConfig& train,
              const Vocabulary& vocab, const DatasetSplit& split,
              const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace darling

#endif  // DARLING_TRAIN_H_
