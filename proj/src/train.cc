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

#include "darling/train.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "darling/error.h"
#include "darling/eval.h"
#include "darling/io.h"

namespace darling {

void TrainConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be >= 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (negatives_per_positive < 1) fail("negatives_per_positive must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps must be > 0");
  if (eval_interval < 1) fail("eval_interval must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (sampler_max_rejections < 1) fail("sampler_max_rejections must be >= 1");
}

double ProbabilityScore(double prob, Polarity polarity, double lambda,
                        double eps_pos, double eps_neg) {
  if (polarity == Polarity::kNegative) return lambda * std::log(1.0 / eps_neg);
  return lambda * std::log(1.0 / std::max(prob, eps_pos));
}

bool UsesProbabilityScore(ModelFamily family, const TrainConfig& train) {
  switch (family) {
    case ModelFamily::kDarling:
      return train.use_probability_score;
    case ModelFamily::kPrTransE:
    case ModelFamily::kPrTransH:
      return true;
    default:
      return false;
  }
}

double GScore(const ModelConfig& config, bool use_probability,
              const EmbeddingStore& store, const Triple& triple,
              std::optional<DemoSetId> demo, double prob, Polarity polarity) {
  const double f =
      Score(config, store, triple.head, triple.relation, triple.tail, demo);
  if (!use_probability) return f;
  return std::abs(ProbabilityScore(prob, polarity, config.lambda,
                                   config.eps_pos, config.eps_neg) -
                  f);
}

LossTermGradients ComputeLossTerm(const ModelConfig& config,
                                  bool use_probability,
                                  const EmbeddingStore& store,
                                  const Quadruple& positive,
                                  double positive_prob,
                                  const Triple& negative) {
  const std::optional<DemoSetId> demo = positive.demo;
  ScoreGradients pos = ScoreWithGradients(
      config, store, positive.head, positive.relation, positive.tail, demo);
  ScoreGradients neg = ScoreWithGradients(
      config, store, negative.head, negative.relation, negative.tail, demo);

  // dg/df: +1 without the probability score; sign(f - f_p) with it, zero at
  // the kink.
  double dpos = 1.0;
  double dneg = 1.0;
  LossTermGradients out;
  out.term.positive = positive;
  out.term.negative = negative;
  if (use_probability) {
    const double fp_pos =
        ProbabilityScore(positive_prob, Polarity::kPositive, config.lambda,
                         config.eps_pos, config.eps_neg);
    const double fp_neg =
        ProbabilityScore(0.0, Polarity::kNegative, config.lambda,
                         config.eps_pos, config.eps_neg);
    out.term.g_pos = std::abs(fp_pos - pos.score);
    out.term.g_neg = std::abs(fp_neg - neg.score);
    dpos = pos.score > fp_pos ? 1.0 : (pos.score < fp_pos ? -1.0 : 0.0);
    dneg = neg.score > fp_neg ? 1.0 : (neg.score < fp_neg ? -1.0 : 0.0);
  } else {
    out.term.g_pos = pos.score;
    out.term.g_neg = neg.score;
  }
  const double arg = out.term.g_pos - out.term.g_neg + config.margin;
  out.term.hinge = std::max(0.0, arg);
  if (arg <= 0.0) return out;

  out.rows.reserve(pos.rows.size() + neg.rows.size());
  for (RowGradient& g : pos.rows) {
    if (dpos != 1.0) {
      for (double& v : g.values) v *= dpos;
    }
    out.rows.push_back(std::move(g));
  }
  const double s = -dneg;
  for (RowGradient& g : neg.rows) {
    for (double& v : g.values) v *= s;
    out.rows.push_back(std::move(g));
  }
  return out;
}

std::unordered_map<Triple, double, TripleHash> AggregateTripleProbabilities(
    const QuadrupleStore& store) {
  std::unordered_map<Triple, double, TripleHash> out;
  for (const Quadruple& q : store.quads()) out[q.triple()] += q.probability;
  for (auto& [k, v] : out) v = std::min(v, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// NegativeSampler

NegativeSampler::NegativeSampler(const Vocabulary& vocab,
                                 const QuadrupleStore& train,
                                 int max_rejections)
    : vocab_(vocab),
      train_(train),
      max_rejections_(max_rejections),
      diseases_(vocab.EntitiesOfKind(EntityKind::kDisease)) {
  for (std::size_t r = 0; r < vocab.num_relations(); ++r) {
    tails_by_relation_[static_cast<uint32_t>(r)] = vocab.EntitiesOfKind(
        vocab.relation(RelationId(static_cast<uint32_t>(r))).tail_kind);
  }
}

NegativeSample NegativeSampler::Sample(const Quadruple& positive,
                                       Rng& rng) const {
  const auto& tails = tails_by_relation_.at(positive.relation.value);
  for (int attempt = 0; attempt < max_rejections_; ++attempt) {
    NegativeSample s;
    s.triple = positive.triple();
    s.corrupted_head = (rng() >> 63) != 0;
    if (s.corrupted_head) {
      s.triple.head = diseases_[UniformIndex(rng, diseases_.size())];
    } else {
      s.triple.tail = tails[UniformIndex(rng, tails.size())];
    }
    if (!train_.ContainsTriple(s.triple)) return s;
  }
  throw Error(ErrorCode::kExhaustedSampler,
              "no negative for (" + vocab_.entity(positive.head).code + ", " +
                  vocab_.relation(positive.relation).name + ", " +
                  vocab_.entity(positive.tail).code + ") after " +
                  std::to_string(max_rejections_) + " rejections");
}

// ---------------------------------------------------------------------------
// GradientBuffer

namespace {

EmbeddingStore ZerosLike(const EmbeddingStore& shape) {
  EmbeddingStore z;
  z.dim = shape.dim;
  for (std::size_t t = 0; t < kNumParamTables; ++t) {
    z.tables[t] = Matrix(shape.tables[t].rows(), shape.tables[t].cols());
  }
  return z;
}

}  // namespace

GradientBuffer::GradientBuffer(const EmbeddingStore& shape)
    : values_(ZerosLike(shape)) {
  for (std::size_t t = 0; t < kNumParamTables; ++t) {
    flags_[t].assign(shape.tables[t].rows(), 0);
  }
}

void GradientBuffer::Accumulate(const RowGradient& g, double scale) {
  const auto t = static_cast<std::size_t>(g.table);
  if (!flags_[t][g.row]) {
    flags_[t][g.row] = 1;
    touched_.emplace_back(g.table, g.row);
  }
  auto row = values_.tables[t].row(g.row);
  for (std::size_t i = 0; i < row.size(); ++i) row[i] += scale * g.values[i];
}

void GradientBuffer::AddFrom(const GradientBuffer& other) {
  for (const auto& [table, r] : other.touched_) {
    const auto t = static_cast<std::size_t>(table);
    if (!flags_[t][r]) {
      flags_[t][r] = 1;
      touched_.emplace_back(table, r);
    }
    auto dst = values_.tables[t].row(r);
    const auto src = other.values_.tables[t].row(r);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

void GradientBuffer::Clear() {
  for (const auto& [table, r] : touched_) {
    const auto t = static_cast<std::size_t>(table);
    flags_[t][r] = 0;
    for (double& v : values_.tables[t].row(r)) v = 0.0;
  }
  touched_.clear();
}

// ---------------------------------------------------------------------------
// Adam

AdamOptimizer::AdamOptimizer(const EmbeddingStore& shape, double beta1,
                             double beta2, double eps)
    : beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(ZerosLike(shape)),
      v_(ZerosLike(shape)) {
  for (std::size_t t = 0; t < kNumParamTables; ++t) {
    active_[t].assign(shape.tables[t].rows(), 0);
  }
}

std::vector<std::pair<ParamTable, uint32_t>> AdamOptimizer::Step(
    EmbeddingStore& store, const GradientBuffer& grads, double learning_rate) {
  ++step_;
  for (const auto& [table, r] : grads.touched()) {
    const auto t = static_cast<std::size_t>(table);
    if (!active_[t][r]) {
      active_[t][r] = 1;
      active_rows_.emplace_back(table, r);
    }
  }
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  std::vector<std::pair<ParamTable, uint32_t>> changed;
  for (const auto& [table, r] : active_rows_) {
    const auto t = static_cast<std::size_t>(table);
    auto p = store.tables[t].row(r);
    auto m = m_.tables[t].row(r);
    auto v = v_.tables[t].row(r);
    const auto g = grads.values().tables[t].row(r);
    bool moved = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double delta =
          learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
      if (delta != 0.0) {
        p[i] -= delta;
        moved = true;
      }
    }
    if (moved) changed.emplace_back(table, r);
  }
  return changed;
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(const ModelConfig& config, const TrainConfig& train,
                 const Vocabulary& vocab, const QuadrupleStore& train_store,
                 EmbeddingStore& store)
    : config_(config),
      train_(train),
      train_store_(train_store),
      store_(store),
      use_probability_(UsesProbabilityScore(config.family, train)),
      sampler_(vocab, train_store, train.sampler_max_rejections),
      adam_(store, train.adam_beta1, train.adam_beta2, train.adam_eps) {
  config.Validate();
  train.Validate();
  for (int i = 0; i < train.threads; ++i) buffers_.emplace_back(store);
  if (config.family == ModelFamily::kPrTransE ||
      config.family == ModelFamily::kPrTransH) {
    triple_probs_ = AggregateTripleProbabilities(train_store);
  }
}

double Trainer::PositiveProbability(const Quadruple& q) const {
  if (triple_probs_.empty()) return q.probability;
  return triple_probs_.at(q.triple());
}

EpochStats Trainer::RunEpoch(Rng& rng) {
  const std::size_t n = train_store_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[UniformIndex(rng, i)]);
  }

  struct Pair {
    std::size_t positive;
    Triple negative;
  };
  EpochStats stats;
  double hinge_sum = 0.0;
  const std::size_t b = static_cast<std::size_t>(train_.batch_size);
  const int threads = train_.threads;
  std::vector<Pair> pairs;
  std::vector<LossTerm> terms;

  for (std::size_t start = 0; start < n; start += b) {
    const std::size_t end = std::min(n, start + b);
    // Negatives are drawn sequentially so the stream is independent of the
    // thread count.
    pairs.clear();
    for (std::size_t i = start; i < end; ++i) {
      const Quadruple& q = train_store_[order[i]];
      for (int k = 0; k < train_.negatives_per_positive; ++k) {
        pairs.push_back({order[i], sampler_.Sample(q, rng).triple});
      }
    }
    terms.assign(pairs.size(), {});
    ParallelFor(
        pairs.size(), threads, [&](std::size_t lo, std::size_t hi, int worker) {
          GradientBuffer& buf = buffers_[worker];
          for (std::size_t i = lo; i < hi; ++i) {
            const Quadruple& pos = train_store_[pairs[i].positive];
            LossTermGradients lt =
                ComputeLossTerm(config_, use_probability_, store_, pos,
                                PositiveProbability(pos), pairs[i].negative);
            for (const RowGradient& g : lt.rows) buf.Accumulate(g, 1.0);
            terms[i] = lt.term;
          }
        });
    for (const LossTerm& t : terms) {
      if (!std::isfinite(t.hinge)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "hinge is " + FormatDouble(t.hinge) + " for positive (" +
                        std::to_string(t.positive.head.value) + ", " +
                        std::to_string(t.positive.relation.value) + ", " +
                        std::to_string(t.positive.tail.value) + ", c" +
                        std::to_string(t.positive.demo.value) +
                        ") vs negative (" +
                        std::to_string(t.negative.head.value) + ", " +
                        std::to_string(t.negative.relation.value) + ", " +
                        std::to_string(t.negative.tail.value) + ")");
      }
      hinge_sum += t.hinge;
      ++stats.terms;
      if (t.hinge > 0.0) ++stats.active_terms;
    }
    for (int w = 1; w < threads; ++w) {
      buffers_[0].AddFrom(buffers_[w]);
      buffers_[w].Clear();
    }
    const auto changed = adam_.Step(store_, buffers_[0], train_.learning_rate);
    buffers_[0].Clear();

    for (const auto& [table, r] : changed) {
      if (table == ParamTable::kNormal) {
        NormalizeInPlace(store_.table(ParamTable::kNormal).row(r));
      } else if (table == ParamTable::kEntity &&
                 config_.entity_norm_constraint) {
        auto e = store_.table(ParamTable::kEntity).row(r);
        double sq = 0.0;
        for (double v : e) sq += v * v;
        if (sq > 1.0) NormalizeInPlace(e);
      }
    }
  }
  stats.mean_hinge =
      stats.terms ? hinge_sum / static_cast<double>(stats.terms) : 0.0;
  return stats;
}

// ---------------------------------------------------------------------------
// Fit

FitResult Fit(const ModelConfig& config, const TrainConfig& train,
              const Vocabulary& vocab, const DatasetSplit& split,
              const std::function<void(const EpochLog&)>& on_epoch) {
  config.Validate();
  train.Validate();
  if (split.train.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty training store");
  }
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  Rng init_rng = MakeRng(train.seed, "init");
  Rng sample_rng = MakeRng(train.seed, "sampling");
  EmbeddingStore store = InitEmbeddings(config, vocab, init_rng);

  const bool have_valid = !split.valid.empty();
  auto valid_mr = [&] {
    return have_valid
               ? MeanRank(config, store, vocab, split.valid, train.threads)
               : kNaN;
  };

  FitResult result;
  result.initial_valid_mean_rank = valid_mr();
  result.best_valid_mean_rank = std::numeric_limits<double>::infinity();
  {
    EpochLog e0{0, kNaN, 0, result.initial_valid_mean_rank, kNaN, elapsed()};
    result.log.push_back(e0);
    if (on_epoch) on_epoch(e0);
  }

  Trainer trainer(config, train, vocab, split.train, store);
  for (int epoch = 1; epoch <= train.epochs; ++epoch) {
    const EpochStats stats = trainer.RunEpoch(sample_rng);
    const bool evaluate =
        epoch % train.eval_interval == 0 || epoch == train.epochs;
    double mr = kNaN;
    if (evaluate) {
      mr = valid_mr();
      // Without a validation set the last epoch wins.
      const bool better =
          have_valid ? mr < result.best_valid_mean_rank : epoch == train.epochs;
      if (better) {
        result.best = store;
        result.best_epoch = epoch;
        result.best_valid_mean_rank = have_valid ? mr : kNaN;
      }
    }
    EpochLog e{epoch,
               stats.mean_hinge,
               stats.active_terms,
               mr,
               result.best_epoch > 0 ? result.best_valid_mean_rank : kNaN,
               elapsed()};
    result.log.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  return result;
}

}  // namespace darling
