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

#ifndef DARLING_MODEL_H_
#define DARLING_MODEL_H_

// Translational scoring geometry shared by DARLING and the baselines.
//
//   DARLING   ||P_c(h) + P_c(r) - P_c(t)||_p,  P_c(v) = v - (w_c . v) w_c
//   TransE    ||h + r - t||_p
//   TransH    as DARLING with the relation's normal w_r instead of w_c
//   TransR    ||M_r h + r - M_r t||_p
//   TransD    ||(h + (h_p . h) r_p) + r - (t + (t_p . t) r_p)||_p
//
// PrTransE / PrTransH share the geometry of TransE / TransH; they differ
// only in how training weights triples (see train.h).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "darling/kg.h"
#include "darling/rng.h"

namespace darling {

enum class ModelFamily : uint8_t {
  kDarling,
  kTransE,
  kTransH,
  kTransR,
  kTransD,
  kPrTransE,
  kPrTransH,
};

std::string_view FamilyName(ModelFamily family);
ModelFamily ParseFamily(std::string_view name);
// DARLING first, then the baselines.
std::vector<ModelFamily> AllFamilies();

// Only DARLING projects onto demographic hyperplanes.
inline bool UsesDemographics(ModelFamily f) {
  return f == ModelFamily::kDarling;
}
inline bool UsesHyperplanes(ModelFamily f) {
  return f == ModelFamily::kDarling || f == ModelFamily::kTransH ||
         f == ModelFamily::kPrTransH;
}

struct ModelConfig {
  ModelFamily family = ModelFamily::kDarling;
  int dim = 128;
  int norm = 2;
  double margin = 1.0;
  double lambda = 1e-2;
  double eps_pos = 1e-4;
  double eps_neg = 1e-15;
  DemoMask demo_mask{7};
  // Rescales entity vectors to norm <= 1 after each step. Off by default.
  bool entity_norm_constraint = false;

  // Throws kInvalidConfig (kEmptyMask for an empty DARLING mask).
  void Validate() const;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ParamTable : uint8_t {
  kEntity,
  kRelation,
  kNormal,
  kRelationMatrix,
  kEntityProjection,
  kRelationProjection,
};
inline constexpr std::size_t kNumParamTables = 6;

std::string_view TableName(ParamTable table);

// Parameter tables; a table unused by the family has zero rows. Normals are
// indexed by demographic set (DARLING) or by relation (TransH family).
// Relation matrices are stored row-major, one d*d row per relation.
struct EmbeddingStore {
  int dim = 0;
  std::array<Matrix, kNumParamTables> tables;

  Matrix& table(ParamTable t) { return tables[static_cast<std::size_t>(t)]; }
  const Matrix& table(ParamTable t) const {
    return tables[static_cast<std::size_t>(t)];
  }

  bool AllFinite() const;

  friend bool operator==(const EmbeddingStore&,
                         const EmbeddingStore&) = default;
};

// Entity/relation vectors uniform in [-6/sqrt(d), 6/sqrt(d)], normals
// uniform on the unit sphere, TransR matrices identity plus small noise.
EmbeddingStore InitEmbeddings(const ModelConfig& config,
                              const Vocabulary& vocab, Rng& rng);

// v - (w . v) w. Throws kNonUnitNormal when | ||w||_2 - 1 | > 1e-6.
std::vector<double> ProjectOntoHyperplane(std::span<const double> v,
                                          std::span<const double> w);

// Rescales to unit Euclidean norm; a zero vector is left unchanged.
void NormalizeInPlace(std::span<double> v);

double Score(const ModelConfig& config, const EmbeddingStore& store,
             EntityId head, RelationId relation, EntityId tail,
             std::optional<DemoSetId> demo);

struct RowGradient {
  ParamTable table;
  uint32_t row;
  std::vector<double> values;
};

struct ScoreGradients {
  double score = 0.0;
  // One entry per participating parameter row. Rows may repeat (e.g. the
  // same entity as head and tail); consumers must accumulate.
  std::vector<RowGradient> rows;
};

// Analytic gradient of Score. At the non-differentiable points of the norm
// (zero residual for p = 2, zero components for p = 1) the zero
// subgradient is used.
ScoreGradients ScoreWithGradients(const ModelConfig& config,
                                  const EmbeddingStore& store, EntityId head,
                                  RelationId relation, EntityId tail,
                                  std::optional<DemoSetId> demo);

// Scores every candidate as the tail of (head, relation). `out` must match
// `candidates` in size.
void ScoreTails(const ModelConfig& config, const EmbeddingStore& store,
                EntityId head, RelationId relation,
                std::optional<DemoSetId> demo,
                std::span<const EntityId> candidates, std::span<double> out);

// Replaces categories outside `mask` with the wildcard. Throws kEmptyMask.
DemographicSet MaskDemoSet(const DemographicSet& demo, DemoMask mask);

// Re-keys every quad by its masked demographic set. Quads that collapse onto
// one (h, r, t, c') merge; their probabilities share the denominator N(h),
// so the merged probability is their sum. Entity and relation ids are
// preserved; demographic-set ids are reassigned in order of first
// appearance.
InternedGraph MaskGraph(const Vocabulary& vocab, const QuadrupleStore& store,
                        DemoMask mask);

struct MaskedSplit {
  Vocabulary vocab;
  DatasetSplit split;
};

// Masks each part of an existing split independently. Held-out quads keep
// their identity, so they may coincide with a merged train quad.
MaskedSplit MaskSplit(const Vocabulary& vocab, const DatasetSplit& split,
                      DemoMask mask);

}  // namespace darling

#endif  // DARLING_MODEL_H_
