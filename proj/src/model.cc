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

#include "darling/model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "darling/error.h"
#include "darling/io.h"

namespace darling {

std::string_view FamilyName(ModelFamily family) {
  switch (family) {
    case ModelFamily::kDarling:
      return "DARLING";
    case ModelFamily::kTransE:
      return "TransE";
    case ModelFamily::kTransH:
      return "TransH";
    case ModelFamily::kTransR:
      return "TransR";
    case ModelFamily::kTransD:
      return "TransD";
    case ModelFamily::kPrTransE:
      return "PrTransE";
    case ModelFamily::kPrTransH:
      return "PrTransH";
  }
  return "?";
}

ModelFamily ParseFamily(std::string_view name) {
  const std::string n = ToLower(Trim(name));
  for (ModelFamily f : AllFamilies()) {
    if (ToLower(FamilyName(f)) == n) return f;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown model family '" + std::string(name) + "'");
}

std::vector<ModelFamily> AllFamilies() {
  return {ModelFamily::kDarling, ModelFamily::kTransE, ModelFamily::kTransH,
          ModelFamily::kTransR,  ModelFamily::kTransD, ModelFamily::kPrTransE,
          ModelFamily::kPrTransH};
}

std::string_view TableName(ParamTable table) {
  switch (table) {
    case ParamTable::kEntity:
      return "entity";
    case ParamTable::kRelation:
      return "relation";
    case ParamTable::kNormal:
      return "normal";
    case ParamTable::kRelationMatrix:
      return "relation_matrix";
    case ParamTable::kEntityProjection:
      return "entity_projection";
    case ParamTable::kRelationProjection:
      return "relation_projection";
  }
  return "?";
}

void ModelConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  if (dim < 1) fail("dim must be >= 1");
  if (norm != 1 && norm != 2) fail("norm must be 1 or 2");
  if (!(margin > 0.0)) fail("margin must be > 0");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(eps_neg > 0.0)) fail("eps_neg must be > 0");
  if (!(eps_pos > eps_neg)) {
    fail(
        "eps_pos must exceed eps_neg (minimum positive probability above "
        "the constant negative probability)");
  }
  if (eps_pos > 1.0) fail("eps_pos must be <= 1");
  if (family == ModelFamily::kDarling && demo_mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, "DARLING needs a non-empty demo mask");
  }
}

bool EmbeddingStore::AllFinite() const {
  for (const Matrix& m : tables) {
    for (double v : m.data()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(std::span<const double> e, int p) {
  double s = 0.0;
  if (p == 1) {
    for (double v : e) s += std::abs(v);
    return s;
  }
  for (double v : e) s += v * v;
  return std::sqrt(s);
}

// Subgradient of ||e||_p; zero at the kinks.
std::vector<double> NormGradient(std::span<const double> e, double norm_value,
                                 int p) {
  std::vector<double> u(e.size(), 0.0);
  if (p == 1) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      u[i] = e[i] > 0.0 ? 1.0 : (e[i] < 0.0 ? -1.0 : 0.0);
    }
  } else if (norm_value > 0.0) {
    for (std::size_t i = 0; i < e.size(); ++i) u[i] = e[i] / norm_value;
  }
  return u;
}

void UniformFill(std::span<double> v, double bound, Rng& rng) {
  for (double& x : v) x = (2.0 * UniformUnit(rng) - 1.0) * bound;
}

// Box-Muller; avoids std::normal_distribution so streams are identical
// across standard libraries.
double Gaussian(Rng& rng) {
  double u1 = UniformUnit(rng);
  while (u1 <= 0.0) u1 = UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

uint32_t NormalRow(const ModelConfig& config, const EmbeddingStore& store,
                   RelationId relation, std::optional<DemoSetId> demo) {
  uint32_t row;
  if (config.family == ModelFamily::kDarling) {
    if (!demo) {
      throw Error(ErrorCode::kMissingDemo,
                  "DARLING scoring needs a demographic set");
    }
    row = demo->value;
  } else {
    row = relation.value;
  }
  if (row >= store.table(ParamTable::kNormal).rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "hyperplane index " + std::to_string(row) + " out of range");
  }
  return row;
}

void CheckIds(const EmbeddingStore& store, EntityId head, RelationId relation,
              EntityId tail) {
  const std::size_t ne = store.table(ParamTable::kEntity).rows();
  const std::size_t nr = store.table(ParamTable::kRelation).rows();
  if (head.value >= ne || tail.value >= ne || relation.value >= nr) {
    throw Error(ErrorCode::kInvalidArgument, "id out of range");
  }
}

// Residual vector e with score = ||e||_p; `x` receives h + r - t where the
// family uses it.
void Residual(const ModelConfig& config, const EmbeddingStore& store,
              EntityId head, RelationId relation, EntityId tail,
              std::optional<DemoSetId> demo, std::vector<double>& e) {
  const std::size_t d = static_cast<std::size_t>(store.dim);
  const auto h = store.table(ParamTable::kEntity).row(head.value);
  const auto t = store.table(ParamTable::kEntity).row(tail.value);
  const auto r = store.table(ParamTable::kRelation).row(relation.value);
  e.assign(d, 0.0);
  switch (config.family) {
    case ModelFamily::kTransE:
    case ModelFamily::kPrTransE:
      for (std::size_t i = 0; i < d; ++i) e[i] = h[i] + r[i] - t[i];
      return;
    case ModelFamily::kDarling:
    case ModelFamily::kTransH:
    case ModelFamily::kPrTransH: {
      const auto w = store.table(ParamTable::kNormal)
                         .row(NormalRow(config, store, relation, demo));
      for (std::size_t i = 0; i < d; ++i) e[i] = h[i] + r[i] - t[i];
      // Projection is linear: P(h) + P(r) - P(t) = P(h + r - t).
      const double wx = Dot(w, e);
      for (std::size_t i = 0; i < d; ++i) e[i] -= wx * w[i];
      return;
    }
    case ModelFamily::kTransR: {
      const auto m =
          store.table(ParamTable::kRelationMatrix).row(relation.value);
      for (std::size_t i = 0; i < d; ++i) {
        double acc = r[i];
        for (std::size_t j = 0; j < d; ++j) acc += m[i * d + j] * (h[j] - t[j]);
        e[i] = acc;
      }
      return;
    }
    case ModelFamily::kTransD: {
      const auto hp =
          store.table(ParamTable::kEntityProjection).row(head.value);
      const auto tp =
          store.table(ParamTable::kEntityProjection).row(tail.value);
      const auto rp =
          store.table(ParamTable::kRelationProjection).row(relation.value);
      const double a = Dot(hp, h);
      const double b = Dot(tp, t);
      for (std::size_t i = 0; i < d; ++i) {
        e[i] = h[i] + a * rp[i] + r[i] - t[i] - b * rp[i];
      }
      return;
    }
  }
}

}  // namespace

EmbeddingStore InitEmbeddings(const ModelConfig& config,
                              const Vocabulary& vocab, Rng& rng) {
  config.Validate();
  const std::size_t d = static_cast<std::size_t>(config.dim);
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  EmbeddingStore s;
  s.dim = config.dim;
  s.table(ParamTable::kEntity) = Matrix(vocab.num_entities(), d);
  s.table(ParamTable::kRelation) = Matrix(vocab.num_relations(), d);
  UniformFill(s.table(ParamTable::kEntity).data(), bound, rng);
  UniformFill(s.table(ParamTable::kRelation).data(), bound, rng);

  if (UsesHyperplanes(config.family)) {
    const std::size_t n = config.family == ModelFamily::kDarling
                              ? vocab.num_demo_sets()
                              : vocab.num_relations();
    Matrix& normals = s.table(ParamTable::kNormal);
    normals = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      auto w = normals.row(i);
      for (double& x : w) x = Gaussian(rng);
      NormalizeInPlace(w);
    }
  }
  if (config.family == ModelFamily::kTransR) {
    Matrix& m = s.table(ParamTable::kRelationMatrix);
    m = Matrix(vocab.num_relations(), d * d);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      UniformFill(row, 1e-2, rng);
      for (std::size_t i = 0; i < d; ++i) row[i * d + i] += 1.0;
    }
  }
  if (config.family == ModelFamily::kTransD) {
    s.table(ParamTable::kEntityProjection) = Matrix(vocab.num_entities(), d);
    s.table(ParamTable::kRelationProjection) = Matrix(vocab.num_relations(), d);
    UniformFill(s.table(ParamTable::kEntityProjection).data(), 0.1 * bound,
                rng);
    UniformFill(s.table(ParamTable::kRelationProjection).data(), 0.1 * bound,
                rng);
  }
  return s;
}

std::vector<double> ProjectOntoHyperplane(std::span<const double> v,
                                          std::span<const double> w) {
  if (v.size() != w.size()) {
    throw Error(ErrorCode::kInvalidArgument, "dimension mismatch");
  }
  const double wn = Norm(w, 2);
  if (std::abs(wn - 1.0) > 1e-6) {
    throw Error(ErrorCode::kNonUnitNormal,
                "normal has norm " + FormatDouble(wn));
  }
  const double wv = Dot(w, v);
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= wv * w[i];
  return out;
}

void NormalizeInPlace(std::span<double> v) {
  const double n = Norm(v, 2);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

double Score(const ModelConfig& config, const EmbeddingStore& store,
             EntityId head, RelationId relation, EntityId tail,
             std::optional<DemoSetId> demo) {
  CheckIds(store, head, relation, tail);
  std::vector<double> e;
  Residual(config, store, head, relation, tail, demo, e);
  return Norm(e, config.norm);
}

ScoreGradients ScoreWithGradients(const ModelConfig& config,
                                  const EmbeddingStore& store, EntityId head,
                                  RelationId relation, EntityId tail,
                                  std::optional<DemoSetId> demo) {
  CheckIds(store, head, relation, tail);
  const std::size_t d = static_cast<std::size_t>(store.dim);
  std::vector<double> e;
  Residual(config, store, head, relation, tail, demo, e);
  ScoreGradients out;
  out.score = Norm(e, config.norm);
  const std::vector<double> u = NormGradient(e, out.score, config.norm);

  const auto h = store.table(ParamTable::kEntity).row(head.value);
  const auto t = store.table(ParamTable::kEntity).row(tail.value);
  const auto r = store.table(ParamTable::kRelation).row(relation.value);

  auto emit = [&](ParamTable table, uint32_t row, std::vector<double> g) {
    out.rows.push_back({table, row, std::move(g)});
  };
  auto negated = [](std::vector<double> g) {
    for (double& x : g) x = -x;
    return g;
  };

  switch (config.family) {
    case ModelFamily::kTransE:
    case ModelFamily::kPrTransE:
      emit(ParamTable::kEntity, head.value, u);
      emit(ParamTable::kRelation, relation.value, u);
      emit(ParamTable::kEntity, tail.value, negated(u));
      break;

    case ModelFamily::kDarling:
    case ModelFamily::kTransH:
    case ModelFamily::kPrTransH: {
      const uint32_t wrow = NormalRow(config, store, relation, demo);
      const auto w = store.table(ParamTable::kNormal).row(wrow);
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = h[i] + r[i] - t[i];
      // e = x - (w.x) w is symmetric-linear in x: de/dx = I - w w^T.
      const double wu = Dot(w, u);
      const double wx = Dot(w, x);
      std::vector<double> g(d), gw(d);
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = u[i] - wu * w[i];
        gw[i] = -wu * x[i] - wx * u[i];
      }
      emit(ParamTable::kEntity, head.value, g);
      emit(ParamTable::kRelation, relation.value, g);
      emit(ParamTable::kEntity, tail.value, negated(g));
      emit(ParamTable::kNormal, wrow, std::move(gw));
      break;
    }

    case ModelFamily::kTransR: {
      const auto m =
          store.table(ParamTable::kRelationMatrix).row(relation.value);
      std::vector<double> mtu(d, 0.0), gm(d * d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          mtu[j] += m[i * d + j] * u[i];
          gm[i * d + j] = u[i] * (h[j] - t[j]);
        }
      }
      emit(ParamTable::kEntity, head.value, mtu);
      emit(ParamTable::kRelation, relation.value, u);
      emit(ParamTable::kEntity, tail.value, negated(mtu));
      emit(ParamTable::kRelationMatrix, relation.value, std::move(gm));
      break;
    }

    case ModelFamily::kTransD: {
      const auto hp =
          store.table(ParamTable::kEntityProjection).row(head.value);
      const auto tp =
          store.table(ParamTable::kEntityProjection).row(tail.value);
      const auto rp =
          store.table(ParamTable::kRelationProjection).row(relation.value);
      const double a = Dot(hp, h);
      const double b = Dot(tp, t);
      const double s = Dot(rp, u);
      std::vector<double> gh(d), ghp(d), gt(d), gtp(d), grp(d);
      for (std::size_t i = 0; i < d; ++i) {
        gh[i] = u[i] + s * hp[i];
        ghp[i] = s * h[i];
        gt[i] = -u[i] - s * tp[i];
        gtp[i] = -s * t[i];
        grp[i] = (a - b) * u[i];
      }
      emit(ParamTable::kEntity, head.value, std::move(gh));
      emit(ParamTable::kEntityProjection, head.value, std::move(ghp));
      emit(ParamTable::kRelation, relation.value, u);
      emit(ParamTable::kEntity, tail.value, std::move(gt));
      emit(ParamTable::kEntityProjection, tail.value, std::move(gtp));
      emit(ParamTable::kRelationProjection, relation.value, std::move(grp));
      break;
    }
  }
  return out;
}

void ScoreTails(const ModelConfig& config, const EmbeddingStore& store,
                EntityId head, RelationId relation,
                std::optional<DemoSetId> demo,
                std::span<const EntityId> candidates, std::span<double> out) {
  if (candidates.size() != out.size()) {
    throw Error(ErrorCode::kInvalidArgument, "output size mismatch");
  }
  std::vector<double> e;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CheckIds(store, head, relation, candidates[i]);
    Residual(config, store, head, relation, candidates[i], demo, e);
    out[i] = Norm(e, config.norm);
  }
}

DemographicSet MaskDemoSet(const DemographicSet& demo, DemoMask mask) {
  if (mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, "demographic mask is empty");
  }
  DemographicSet out = demo;
  if (!mask.Has(DemoCategory::kGender)) out.gender = DemographicSet::kWildcard;
  if (!mask.Has(DemoCategory::kAge)) out.age = DemographicSet::kWildcard;
  if (!mask.Has(DemoCategory::kEthnicity)) {
    out.ethnicity = DemographicSet::kWildcard;
  }
  return out;
}

namespace {

Vocabulary CopyWithoutDemoSets(const Vocabulary& vocab) {
  Vocabulary out(vocab.scheme());
  for (const EntityRecord& e : vocab.entities()) {
    out.AddEntity(e.code, e.kind, e.external_code);
  }
  for (const RelationRecord& r : vocab.relations()) {
    out.AddRelation(r.name, r.tail_kind);
  }
  return out;
}

// Re-keys `store` into `masked`, merging quads that collapse onto the same
// masked key in first-appearance order.
QuadrupleStore MaskStore(const Vocabulary& vocab, const QuadrupleStore& store,
                         DemoMask mask, Vocabulary& masked) {
  std::vector<Quadruple> merged;
  std::map<std::pair<std::tuple<uint32_t, uint32_t, uint32_t>, uint32_t>,
           std::size_t>
      position;
  for (const Quadruple& q : store.quads()) {
    const DemoSetId c =
        masked.AddDemoSet(MaskDemoSet(vocab.demo_set(q.demo), mask));
    const auto key = std::make_pair(
        std::make_tuple(q.head.value, q.relation.value, q.tail.value), c.value);
    auto [it, inserted] = position.emplace(key, merged.size());
    if (inserted) {
      merged.push_back({q.head, q.relation, q.tail, c, q.probability});
    } else {
      Quadruple& m = merged[it->second];
      m.probability = std::min(1.0, m.probability + q.probability);
    }
  }
  QuadrupleStore out;
  for (const Quadruple& q : merged) out.Add(q);
  return out;
}

}  // namespace

InternedGraph MaskGraph(const Vocabulary& vocab, const QuadrupleStore& store,
                        DemoMask mask) {
  InternedGraph g{CopyWithoutDemoSets(vocab), {}};
  g.store = MaskStore(vocab, store, mask, g.vocab);
  return g;
}

MaskedSplit MaskSplit(const Vocabulary& vocab, const DatasetSplit& split,
                      DemoMask mask) {
  MaskedSplit m{CopyWithoutDemoSets(vocab), {}};
  m.split.train = MaskStore(vocab, split.train, mask, m.vocab);
  m.split.valid = MaskStore(vocab, split.valid, mask, m.vocab);
  m.split.test = MaskStore(vocab, split.test, mask, m.vocab);
  return m;
}

}  // namespace darling
