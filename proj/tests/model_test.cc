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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "darling/error.h"
#include "darling/rng.h"
#include "testing.h"

namespace darling {
namespace {

std::vector<double> RandomVector(Rng& rng, std::size_t d, double scale = 1.0) {
  std::vector<double> v(d);
  for (double& x : v) x = scale * (2.0 * UniformUnit(rng) - 1.0);
  return v;
}

std::vector<double> RandomUnit(Rng& rng, std::size_t d) {
  std::vector<double> v = RandomVector(rng, d);
  NormalizeInPlace(v);
  return v;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Two diseases, one medicine, one relation and `n_demo` demo sets.
Vocabulary TinyVocab(int n_demo = 1) {
  Vocabulary v;
  v.AddEntity("D1", EntityKind::kDisease);
  v.AddEntity("M1", EntityKind::kMedicine);
  v.AddEntity("M2", EntityKind::kMedicine);
  v.AddRelation("Disease_to_Medicine", EntityKind::kMedicine);
  for (int i = 0; i < n_demo; ++i) v.AddDemoSet({i % 2, i / 2, 0});
  return v;
}

EmbeddingStore Store(const ModelConfig& config, const Vocabulary& vocab,
                     uint64_t seed = 1) {
  Rng rng(seed);
  return InitEmbeddings(config, vocab, rng);
}

void SetRow(EmbeddingStore& s, ParamTable t, uint32_t row,
            std::vector<double> v) {
  auto dst = s.table(t).row(row);
  ASSERT_EQ(dst.size(), v.size());
  std::copy(v.begin(), v.end(), dst.begin());
}

TEST(Projection, HandExample) {
  const auto p = ProjectOntoHyperplane(std::vector<double>{1, 1, 0},
                                       std::vector<double>{0, 1, 0});
  EXPECT_EQ(p, (std::vector<double>{1, 0, 0}));
}

TEST(Projection, OrthogonalAndParallelInputs) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto w = RandomUnit(rng, 8);
    std::vector<double> three_w(w);
    for (double& x : three_w) x *= 3.0;
    for (double x : ProjectOntoHyperplane(three_w, w)) EXPECT_NEAR(x, 0, 1e-12);
    auto v = RandomVector(rng, 8);
    const double c = Dot(v, w);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * w[k];
    const auto p = ProjectOntoHyperplane(v, w);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(p[k], v[k], 1e-12);
  }
}

TEST(Projection, IdempotentAndOrthogonal) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto w = RandomUnit(rng, 16);
    const auto v = RandomVector(rng, 16, 5.0);
    const auto p = ProjectOntoHyperplane(v, w);
    const auto pp = ProjectOntoHyperplane(p, w);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(pp[k], p[k], 1e-12);
    EXPECT_NEAR(Dot(p, w), 0.0, 1e-6 * std::sqrt(Dot(v, v)));
  }
}

TEST(Projection, NonUnitNormal) {
  try {
    ProjectOntoHyperplane(std::vector<double>{1, 0}, std::vector<double>{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonUnitNormal);
  }
  EXPECT_NO_THROW(ProjectOntoHyperplane(std::vector<double>{1, 0},
                                        std::vector<double>{1.0 + 5e-7, 0}));
}

TEST(Score, TransEExactTranslation) {
  ModelConfig c;
  c.family = ModelFamily::kTransE;
  c.dim = 2;
  const Vocabulary v = TinyVocab();
  EmbeddingStore s = Store(c, v);
  SetRow(s, ParamTable::kEntity, 0, {1, 0});
  SetRow(s, ParamTable::kRelation, 0, {0, 1});
  SetRow(s, ParamTable::kEntity, 1, {1, 1});
  EXPECT_EQ(Score(c, s, EntityId(0), RelationId(0), EntityId(1), std::nullopt),
            0.0);
}

TEST(Score, DarlingDependsOnHyperplane) {
  ModelConfig c;
  c.dim = 2;
  const Vocabulary v = TinyVocab(2);
  EmbeddingStore s = Store(c, v);
  SetRow(s, ParamTable::kEntity, 0, {1, 0});
  SetRow(s, ParamTable::kRelation, 0, {0, 0});
  SetRow(s, ParamTable::kEntity, 1, {0, 0});
  SetRow(s, ParamTable::kNormal, 0, {1, 0});
  SetRow(s, ParamTable::kNormal, 1, {0, 1});
  EXPECT_NEAR(
      Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(0)), 0.0,
      1e-15);
  EXPECT_NEAR(
      Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(1)), 1.0,
      1e-15);
}

TEST(Score, DarlingZeroWhenTranslationHoldsOrIsParallel) {
  ModelConfig c;
  c.dim = 6;
  const Vocabulary v = TinyVocab(3);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    EmbeddingStore s = Store(c, v, i + 1);
    const auto h = RandomVector(rng, 6);
    const auto r = RandomVector(rng, 6);
    std::vector<double> t(6);
    for (int k = 0; k < 6; ++k) t[k] = h[k] + r[k];
    SetRow(s, ParamTable::kEntity, 0, h);
    SetRow(s, ParamTable::kRelation, 0, r);
    SetRow(s, ParamTable::kEntity, 1, t);
    for (uint32_t demo = 0; demo < 3; ++demo) {
      EXPECT_NEAR(
          Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(demo)),
          0.0, 1e-12);
    }
    // h + r - t parallel to w_0.
    const auto w = s.table(ParamTable::kNormal).row(0);
    const double alpha = 3.0 * UniformUnit(rng) - 1.5;
    for (int k = 0; k < 6; ++k) t[k] = h[k] + r[k] - alpha * w[k];
    SetRow(s, ParamTable::kEntity, 1, t);
    EXPECT_NEAR(
        Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(0)), 0.0,
        1e-6);
  }
}

TEST(Score, DarlingNeedsDemo) {
  ModelConfig c;
  c.dim = 4;
  const Vocabulary v = TinyVocab();
  const EmbeddingStore s = Store(c, v);
  try {
    Score(c, s, EntityId(0), RelationId(0), EntityId(1), std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingDemo);
  }
}

TEST(Score, NonNegativeAndAsymmetric) {
  const Vocabulary v = TinyVocab(2);
  for (ModelFamily f : AllFamilies()) {
    for (int p : {1, 2}) {
      ModelConfig c;
      c.family = f;
      c.dim = 8;
      c.norm = p;
      int asymmetric = 0;
      for (uint64_t seed = 1; seed <= 20; ++seed) {
        const EmbeddingStore s = Store(c, v, seed);
        const double a =
            Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(1));
        const double b =
            Score(c, s, EntityId(1), RelationId(0), EntityId(0), DemoSetId(1));
        EXPECT_GE(a, 0.0);
        EXPECT_GE(b, 0.0);
        asymmetric += std::abs(a - b) > 1e-9;
      }
      EXPECT_GT(asymmetric, 0) << FamilyName(f);
    }
  }
}

TEST(Score, SingleHyperplaneDarlingEqualsTransH) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    ModelConfig dc;
    dc.dim = 12;
    ModelConfig hc = dc;
    hc.family = ModelFamily::kTransH;
    const Vocabulary v = TinyVocab(1);
    EmbeddingStore ds = Store(dc, v, i + 1);
    EmbeddingStore hs = ds;
    // One shared hyperplane: the single demo set and the single relation.
    const auto w = RandomUnit(rng, 12);
    SetRow(ds, ParamTable::kNormal, 0, w);
    SetRow(hs, ParamTable::kNormal, 0, w);
    for (uint32_t t : {1u, 2u}) {
      EXPECT_DOUBLE_EQ(
          Score(dc, ds, EntityId(0), RelationId(0), EntityId(t), DemoSetId(0)),
          Score(hc, hs, EntityId(0), RelationId(0), EntityId(t), std::nullopt));
    }
  }
}

TEST(Score, ScoreTailsMatchesScore) {
  const InternedGraph g = testing::RandomGraph(4, 100, 5, 6, 6);
  for (ModelFamily f : AllFamilies()) {
    ModelConfig c;
    c.family = f;
    c.dim = 8;
    const EmbeddingStore s = Store(c, g.vocab);
    const auto cands = g.vocab.EntitiesOfKind(EntityKind::kMedicine);
    std::vector<double> out(cands.size());
    const Quadruple& q = g.store[0];
    ScoreTails(c, s, q.head, q.relation, q.demo, cands, out);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      EXPECT_EQ(out[i], Score(c, s, q.head, q.relation, cands[i], q.demo));
    }
  }
}

// Central finite difference of Score with respect to one parameter.
double NumericPartial(const ModelConfig& c, EmbeddingStore s, ParamTable table,
                      uint32_t row, std::size_t col, double step) {
  const double x = s.table(table).row(row)[col];
  s.table(table).row(row)[col] = x + step;
  const double up =
      Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(0));
  s.table(table).row(row)[col] = x - step;
  const double down =
      Score(c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(0));
  return (up - down) / (2 * step);
}

TEST(ScoreGradients, MatchFiniteDifferences) {
  const Vocabulary v = TinyVocab(1);
  for (ModelFamily f : AllFamilies()) {
    for (int d : {4, 16}) {
      ModelConfig c;
      c.family = f;
      c.dim = d;
      for (uint64_t seed = 1; seed <= 10; ++seed) {
        const EmbeddingStore s = Store(c, v, seed);
        const ScoreGradients g = ScoreWithGradients(
            c, s, EntityId(0), RelationId(0), EntityId(1), DemoSetId(0));
        EXPECT_DOUBLE_EQ(g.score, Score(c, s, EntityId(0), RelationId(0),
                                        EntityId(1), DemoSetId(0)));
        for (const RowGradient& rg : g.rows) {
          double diff = 0.0, norm = 0.0;
          for (std::size_t k = 0; k < rg.values.size(); ++k) {
            const double n = NumericPartial(c, s, rg.table, rg.row, k, 1e-5);
            diff += (n - rg.values[k]) * (n - rg.values[k]);
            norm += n * n;
          }
          EXPECT_LE(std::sqrt(diff), 1e-4 * std::max(std::sqrt(norm), 1e-8))
              << FamilyName(f) << " " << TableName(rg.table);
        }
      }
    }
  }
}

TEST(ScoreGradients, TransEClosedForm) {
  ModelConfig c;
  c.family = ModelFamily::kTransE;
  c.dim = 5;
  const Vocabulary v = TinyVocab();
  const EmbeddingStore s = Store(c, v, 3);
  const auto h = s.table(ParamTable::kEntity).row(0);
  const auto t = s.table(ParamTable::kEntity).row(1);
  const auto r = s.table(ParamTable::kRelation).row(0);
  std::vector<double> e(5);
  double n = 0.0;
  for (int k = 0; k < 5; ++k) {
    e[k] = h[k] + r[k] - t[k];
    n += e[k] * e[k];
  }
  n = std::sqrt(n);
  const ScoreGradients g = ScoreWithGradients(c, s, EntityId(0), RelationId(0),
                                              EntityId(1), std::nullopt);
  for (const RowGradient& rg : g.rows) {
    const double sign =
        rg.table == ParamTable::kEntity && rg.row == 1 ? -1.0 : 1.0;
    for (int k = 0; k < 5; ++k) {
      EXPECT_NEAR(rg.values[k], sign * e[k] / n, 1e-12);
    }
  }
}

TEST(ScoreGradients, ZeroAtExactFit) {
  ModelConfig c;
  c.dim = 3;
  const Vocabulary v = TinyVocab();
  EmbeddingStore s = Store(c, v);
  SetRow(s, ParamTable::kEntity, 0, {1, 2, 3});
  SetRow(s, ParamTable::kRelation, 0, {0.5, 0.5, 0.5});
  SetRow(s, ParamTable::kEntity, 1, {1.5, 2.5, 3.5});
  const ScoreGradients g = ScoreWithGradients(c, s, EntityId(0), RelationId(0),
                                              EntityId(1), DemoSetId(0));
  EXPECT_EQ(g.score, 0.0);
  for (const RowGradient& rg : g.rows) {
    for (double x : rg.values) EXPECT_EQ(x, 0.0);
  }
}

TEST(InitEmbeddings, ShapesAndRanges) {
  const InternedGraph g = testing::RandomGraph(2, 80, 5, 6, 6);
  for (ModelFamily f : AllFamilies()) {
    ModelConfig c;
    c.family = f;
    c.dim = 16;
    const EmbeddingStore s = Store(c, g.vocab);
    EXPECT_TRUE(s.AllFinite());
    const double bound = 6.0 / 4.0;
    EXPECT_EQ(s.table(ParamTable::kEntity).rows(), g.vocab.num_entities());
    for (double x : s.table(ParamTable::kEntity).data()) {
      EXPECT_LE(std::abs(x), bound);
    }
    const Matrix& normals = s.table(ParamTable::kNormal);
    if (f == ModelFamily::kDarling) {
      EXPECT_EQ(normals.rows(), g.vocab.num_demo_sets());
    } else if (UsesHyperplanes(f)) {
      EXPECT_EQ(normals.rows(), g.vocab.num_relations());
    } else {
      EXPECT_TRUE(normals.empty());
    }
    for (std::size_t i = 0; i < normals.rows(); ++i) {
      double n = 0.0;
      for (double x : normals.row(i)) n += x * x;
      EXPECT_NEAR(n, 1.0, 1e-12);
    }
    if (f == ModelFamily::kTransR) {
      const auto m = s.table(ParamTable::kRelationMatrix).row(0);
      for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
          EXPECT_NEAR(m[i * 16 + j], i == j ? 1.0 : 0.0, 1e-2);
        }
      }
    }
  }
}

TEST(ModelConfig, Validation) {
  ModelConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.eps_pos = 1e-16;
  EXPECT_THROW(c.Validate(), Error);
  c = ModelConfig{};
  c.margin = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c = ModelConfig{};
  c.norm = 3;
  EXPECT_THROW(c.Validate(), Error);
  c = ModelConfig{};
  c.demo_mask = DemoMask{0};
  try {
    c.Validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMask);
  }
}

TEST(MaskDemoSet, Examples) {
  const DemographicSet s{1, 3, 4};
  EXPECT_EQ(MaskDemoSet(s, DemoMask{7}), s);
  const DemographicSet a = MaskDemoSet(s, DemoMask::Parse("Age"));
  EXPECT_EQ(a.gender, DemographicSet::kWildcard);
  EXPECT_EQ(a.age, 3);
  EXPECT_EQ(a.ethnicity, DemographicSet::kWildcard);
  EXPECT_THROW(MaskDemoSet(s, DemoMask{0}), Error);
}

TEST(MaskGraph, CollapsesDemoSets) {
  const InternedGraph g = testing::RandomGraph(6, 600, 6, 8, 8, 7);
  EXPECT_LE(MaskGraph(g.vocab, g.store, DemoMask::Parse("Gender"))
                .vocab.num_demo_sets(),
            2u);
  EXPECT_LE(
      MaskGraph(g.vocab, g.store, DemoMask::Parse("Age")).vocab.num_demo_sets(),
      6u);
  EXPECT_LE(
      MaskGraph(g.vocab, g.store, DemoMask::Parse("A+E")).vocab.num_demo_sets(),
      42u);
  const InternedGraph full = MaskGraph(g.vocab, g.store, DemoMask{7});
  EXPECT_EQ(full.store.size(), g.store.size());
  EXPECT_EQ(full.vocab.num_demo_sets(), g.vocab.num_demo_sets());
}

TEST(MaskGraph, MergedProbabilitiesSum) {
  const std::vector<RawQuad> raw = {
      testing::Raw("D1", "Disease_to_Medicine", "M1",
                   testing::Demo("male", "[18-48)", "white"), 0.25),
      testing::Raw("D1", "Disease_to_Medicine", "M1",
                   testing::Demo("female", "[18-48)", "asian"), 0.5),
      testing::Raw("D1", "Disease_to_Medicine", "M1",
                   testing::Demo("female", ">=80", "asian"), 0.125)};
  const InternedGraph g = InternGraph(raw, DemoScheme::Default());
  const InternedGraph m = MaskGraph(g.vocab, g.store, DemoMask::Parse("Age"));
  ASSERT_EQ(m.store.size(), 2u);
  EXPECT_DOUBLE_EQ(m.store[0].probability, 0.75);
  EXPECT_DOUBLE_EQ(m.store[1].probability, 0.125);
  EXPECT_EQ(m.vocab.num_entities(), g.vocab.num_entities());
}

TEST(MaskSplit, KeepsHeldOutQuads) {
  const InternedGraph g = testing::RandomGraph(7, 400, 6, 8, 8, 7);
  const DatasetSplit split = SplitDataset(g.store, {}, 3);
  const MaskedSplit m = MaskSplit(g.vocab, split, DemoMask::Parse("Gender"));
  EXPECT_LE(m.vocab.num_demo_sets(), 2u);
  EXPECT_LE(m.split.train.size(), split.train.size());
  for (const Quadruple& q : m.split.test.quads()) {
    EXPECT_LT(q.demo.value, m.vocab.num_demo_sets());
  }
  std::size_t test_triples = 0;
  for (const Quadruple& q : split.test.quads()) {
    test_triples += m.split.test.ContainsTriple(q.triple());
  }
  EXPECT_EQ(test_triples, split.test.size());
}

}  // namespace
}  // namespace darling
