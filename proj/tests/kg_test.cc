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

#include "darling/kg.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "darling/error.h"
#include "testing.h"

namespace darling {
namespace {

using testing::Demo;
using testing::Raw;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(DemoScheme, DefaultAlphabets) {
  const DemoScheme s = DemoScheme::Default();
  EXPECT_EQ(s.genders.size(), 2u);
  EXPECT_EQ(s.age_groups.size(), 6u);
  EXPECT_EQ(s.ethnicities.size(), 7u);
  EXPECT_EQ(s.ethnicity_fallback, "unknown");
  EXPECT_EQ(s.AgeGroupForYears(0), 0);
  EXPECT_EQ(s.AgeGroupForYears(17), 0);
  EXPECT_EQ(s.AgeGroupForYears(18), 1);
  EXPECT_EQ(s.AgeGroupForYears(48), 2);
  EXPECT_EQ(s.AgeGroupForYears(79), 4);
  EXPECT_EQ(s.AgeGroupForYears(80), 5);
  EXPECT_EQ(s.AgeGroupForYears(120), 5);
}

TEST(DemoScheme, ValidateRejectsGappedAges) {
  DemoScheme s = DemoScheme::Default();
  s.age_groups[1].min_years = 20;
  EXPECT_THROW(s.Validate(), Error);
}

TEST(DemoTuple, LabelRoundTrip) {
  const DemoScheme s = DemoScheme::Default();
  const DemographicSet set = FromTuple(Demo("male", "[18-48)", "white"), s);
  EXPECT_EQ(DemoLabel(set, s), "male|[18-48)|white");
  EXPECT_EQ(ParseDemoTuple("male|[18-48)|white"),
            Demo("male", "[18-48)", "white"));
  EXPECT_EQ(CodeOf([&] { FromTuple(Demo("robot", "[18-48)", "white"), s); }),
            ErrorCode::kUnknownDemographicValue);
}

TEST(InternGraph, MinimalGraph) {
  const std::vector<RawQuad> raw = {
      Raw("D1", "Disease_to_Medicine", "M1", Demo("male", "[18-48)", "white"))};
  const InternedGraph g = InternGraph(raw, DemoScheme::Default());
  EXPECT_EQ(g.vocab.num_entities(), 2u);
  EXPECT_EQ(g.vocab.num_relations(), 1u);
  EXPECT_EQ(g.vocab.num_demo_sets(), 1u);
  ASSERT_EQ(g.store.size(), 1u);
  EXPECT_EQ(g.vocab.entity(g.store[0].head).kind, EntityKind::kDisease);
  EXPECT_EQ(g.vocab.entity(g.store[0].tail).kind, EntityKind::kMedicine);
  EXPECT_EQ(g.store[0].probability, 1.0);
}

TEST(InternGraph, DuplicateQuadruple) {
  const auto q =
      Raw("D1", "Disease_to_Medicine", "M1", Demo("male", "[18-48)", "white"));
  const std::vector<RawQuad> raw = {q, q};
  EXPECT_EQ(CodeOf([&] { InternGraph(raw, DemoScheme::Default()); }),
            ErrorCode::kDuplicateQuadruple);
}

TEST(InternGraph, UnknownDemographicValue) {
  const std::vector<RawQuad> raw = {
      Raw("D1", "Disease_to_Medicine", "M1", Demo("male", "[5-6)", "white"))};
  EXPECT_EQ(CodeOf([&] { InternGraph(raw, DemoScheme::Default()); }),
            ErrorCode::kUnknownDemographicValue);
}

TEST(InternGraph, HeadMustBeDisease) {
  const std::vector<EntityRecord> table = {
      {"X1", EntityKind::kTreatment, std::nullopt},
      {"M1", EntityKind::kMedicine, std::nullopt}};
  const std::vector<RawQuad> raw = {
      Raw("X1", "Disease_to_Medicine", "M1", Demo("male", "[18-48)", "white"))};
  EXPECT_EQ(CodeOf([&] { InternGraph(raw, DemoScheme::Default(), table); }),
            ErrorCode::kTypeViolation);
}

TEST(InternGraph, TailKindFollowsRelation) {
  // A medicine code used as a treatment tail conflicts with its first use.
  const std::vector<RawQuad> raw = {
      Raw("D1", "Disease_to_Medicine", "M1", Demo("male", "[18-48)", "white")),
      Raw("D1", "Disease_to_Treatment", "M1",
          Demo("male", "[18-48)", "white"))};
  EXPECT_EQ(CodeOf([&] { InternGraph(raw, DemoScheme::Default()); }),
            ErrorCode::kTypeViolation);
}

TEST(InternGraph, ProbabilityOutOfRange) {
  for (double p : {0.0, -0.5, 1.5}) {
    const std::vector<RawQuad> raw = {Raw("D1", "Disease_to_Medicine", "M1",
                                          Demo("male", "[18-48)", "white"), p)};
    EXPECT_THROW(InternGraph(raw, DemoScheme::Default()), Error) << p;
  }
}

TEST(InternGraph, IdsByFirstAppearance) {
  const std::vector<RawQuad> raw = {
      Raw("D2", "Disease_to_Medicine", "M9", Demo("male", "[18-48)", "white")),
      Raw("D1", "Disease_to_Treatment", "P3", Demo("female", ">=80", "asian")),
      Raw("D2", "Disease_to_Treatment", "P3",
          Demo("male", "[18-48)", "white"))};
  const InternedGraph g = InternGraph(raw, DemoScheme::Default());
  const std::vector<std::string> codes = {"D2", "M9", "D1", "P3"};
  for (uint32_t i = 0; i < codes.size(); ++i) {
    EXPECT_EQ(g.vocab.entity(EntityId(i)).code, codes[i]);
  }
  EXPECT_EQ(g.vocab.relation(RelationId(0)).name, "Disease_to_Medicine");
  EXPECT_EQ(g.vocab.num_demo_sets(), 2u);
}

TEST(QuadrupleStore, MembershipIndexMatchesLinearScan) {
  const auto demo1 = Demo("male", "[18-48)", "white");
  const auto demo2 = Demo("female", "[60-70)", "black");
  // Five quads over three diseases; one triple repeats across demo sets.
  const std::vector<RawQuad> raw = {
      Raw("D1", "Disease_to_Medicine", "M1", demo1),
      Raw("D1", "Disease_to_Medicine", "M1", demo2),
      Raw("D2", "Disease_to_Treatment", "P1", demo1),
      Raw("D3", "Disease_to_Medicine", "M2", demo2),
      Raw("D3", "Disease_to_Treatment", "P1", demo1)};
  const InternedGraph g = InternGraph(raw, DemoScheme::Default());
  std::vector<Triple> scan;
  for (const Quadruple& q : g.store.quads()) {
    if (std::find(scan.begin(), scan.end(), q.triple()) == scan.end()) {
      scan.push_back(q.triple());
    }
  }
  EXPECT_EQ(scan.size(), 4u);
  EXPECT_EQ(g.store.triple_index().size(), scan.size());
  for (const Triple& t : scan) EXPECT_TRUE(g.store.ContainsTriple(t));
}

TEST(QuadrupleStore, RebuiltIndexEqualsIncremental) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const InternedGraph g = testing::RandomGraph(seed, 200, 8, 10, 10);
    EXPECT_EQ(g.store.RebuildTripleIndex(), g.store.triple_index());
  }
}

TEST(QuadrupleStore, DemoIndexPartitionsQuads) {
  const InternedGraph g = testing::RandomGraph(3, 150, 6, 8, 8);
  std::size_t total = 0;
  for (uint32_t c = 0; c < g.vocab.num_demo_sets(); ++c) {
    for (std::size_t i : g.store.QuadsForDemo(DemoSetId(c))) {
      EXPECT_EQ(g.store[i].demo.value, c);
      ++total;
    }
  }
  EXPECT_EQ(total, g.store.size());
}

TEST(InternGraph, DeInternReInternIsIdentity) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const InternedGraph g = testing::RandomGraph(seed, 120, 6, 8, 8);
    const InternedGraph again =
        InternGraph(DeIntern(g.vocab, g.store), DemoScheme::Default());
    EXPECT_EQ(again.vocab.Hash(), g.vocab.Hash());
    ASSERT_EQ(again.store.size(), g.store.size());
    for (std::size_t i = 0; i < g.store.size(); ++i) {
      EXPECT_EQ(again.store[i].triple(), g.store[i].triple());
      EXPECT_EQ(again.store[i].demo, g.store[i].demo);
      EXPECT_EQ(again.store[i].probability, g.store[i].probability);
    }
  }
}

std::string SplitText(const Vocabulary& v, const DatasetSplit& s) {
  return FormatQuadTsv(v, s.train) + "--\n" + FormatQuadTsv(v, s.valid) +
         "--\n" + FormatQuadTsv(v, s.test);
}

TEST(SplitDataset, DeterministicForEqualSeeds) {
  std::vector<RawQuad> raw;
  for (int i = 0; i < 10; ++i) {
    raw.push_back(Raw(
        "D" + std::to_string(i % 2), "Disease_to_Medicine",
        "M" + std::to_string(i % 3),
        Demo(i % 2 ? "male" : "female", "[18-48)", i < 5 ? "white" : "black")));
  }
  const InternedGraph g = InternGraph(raw, DemoScheme::Default());
  const SplitRatios ratios{0.8, 0.1, 0.1};
  EXPECT_EQ(SplitText(g.vocab, SplitDataset(g.store, ratios, 7)),
            SplitText(g.vocab, SplitDataset(g.store, ratios, 7)));
}

TEST(SplitDataset, DifferentSeedsDiffer) {
  const InternedGraph g = testing::RandomGraph(5, 300, 5, 6, 6);
  EXPECT_NE(SplitText(g.vocab, SplitDataset(g.store, {}, 1)),
            SplitText(g.vocab, SplitDataset(g.store, {}, 2)));
}

TEST(SplitDataset, SingletonEntityStaysInTrain) {
  const char* kEth[] = {"white", "black", "asian"};
  std::vector<RawQuad> raw;
  for (int i = 0; i < 40; ++i) {
    raw.push_back(Raw("D" + std::to_string(i % 4), "Disease_to_Medicine",
                      "M" + std::to_string(i % 5),
                      Demo(i % 2 ? "male" : "female", "[18-48)", kEth[i % 3])));
  }
  raw.push_back(Raw("D0", "Disease_to_Medicine", "M_rare",
                    Demo("male", "[18-48)", "white")));
  const InternedGraph g = InternGraph(raw, DemoScheme::Default());
  const EntityId rare = *g.vocab.FindEntity("M_rare");
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const DatasetSplit s = SplitDataset(g.store, {}, seed);
    bool in_train = false;
    for (const Quadruple& q : s.train.quads()) in_train |= q.tail == rare;
    EXPECT_TRUE(in_train) << seed;
    EXPECT_TRUE(SplitInvariantsHold(s));
  }
}

TEST(SplitDataset, SizesMatchRatios) {
  const InternedGraph g = testing::RandomGraph(11, 1000, 10, 12, 12, 6);
  ASSERT_EQ(g.store.size(), 1000u);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const DatasetSplit s = SplitDataset(g.store, {0.8, 0.08, 0.12}, seed);
    EXPECT_NEAR(static_cast<double>(s.train.size()), 800.0, 1.0);
    EXPECT_NEAR(static_cast<double>(s.valid.size()), 80.0, 1.0);
    EXPECT_NEAR(static_cast<double>(s.test.size()), 120.0, 1.0);
  }
}

TEST(SplitDataset, InvariantsHoldOnRandomStores) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const InternedGraph g = testing::RandomGraph(seed, 60 + 10 * seed, 8, 9, 9);
    const DatasetSplit s = SplitDataset(g.store, {}, seed);
    EXPECT_TRUE(SplitInvariantsHold(s)) << seed;
    EXPECT_EQ(s.train.size() + s.valid.size() + s.test.size(), g.store.size());
  }
}

TEST(SplitDataset, RejectsBadRatios) {
  const InternedGraph g = testing::RandomGraph(1, 50, 4, 4, 4);
  EXPECT_EQ(CodeOf([&] { SplitDataset(g.store, {0.0, 0.5, 0.5}, 1); }),
            ErrorCode::kInfeasibleSplit);
  EXPECT_EQ(CodeOf([&] { SplitDataset(g.store, {0.5, 0.6, 0.4}, 1); }),
            ErrorCode::kInfeasibleSplit);
  EXPECT_EQ(CodeOf([&] { SplitDataset(g.store, {0.7, 0.1, 0.1}, 1); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { SplitDataset(g.store, {0.9, 0.1, 0.0}, 1); }),
            ErrorCode::kInvalidArgument);
}

TEST(QuadTsv, RoundTrip) {
  const InternedGraph g = testing::RandomGraph(2, 80, 5, 6, 6);
  const std::string text = FormatQuadTsv(g.vocab, g.store);
  EXPECT_EQ(text.front(), '#');
  const std::vector<RawQuad> parsed = ParseQuadTsv(text);
  const std::vector<RawQuad> expected = DeIntern(g.vocab, g.store);
  ASSERT_EQ(parsed.size(), expected.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].head, expected[i].head);
    EXPECT_EQ(parsed[i].tail, expected[i].tail);
    EXPECT_EQ(parsed[i].demo, expected[i].demo);
    EXPECT_NEAR(parsed[i].probability, expected[i].probability, 1e-11);
  }
}

TEST(QuadTsv, CommentsAndErrors) {
  const auto q = ParseQuadTsv(
      "# header\nD1\tDisease_to_Medicine\tM1\tmale|[18-48)|white\t0.5\n\n");
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].probability, 0.5);
  EXPECT_EQ(CodeOf([] { ParseQuadTsv("D1\tDisease_to_Medicine\tM1\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseQuadTsv("D1\tDisease_to_Medicine\tM1\tmale|a|b\tabc\n");
            }),
            ErrorCode::kParseError);
}

TEST(EntitiesTsv, RoundTrip) {
  const std::vector<EntityRecord> e = {
      {"D1", EntityKind::kDisease, std::string("ICD9:250")},
      {"P1", EntityKind::kTreatment, std::nullopt},
      {"M1", EntityKind::kMedicine, std::string("DB00001")}};
  const auto back = ParseEntitiesTsv(FormatEntitiesTsv(e));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].code, e[i].code);
    EXPECT_EQ(back[i].kind, e[i].kind);
    EXPECT_EQ(back[i].external_code, e[i].external_code);
  }
}

TEST(Vocabulary, HashTracksContent) {
  const InternedGraph a = testing::RandomGraph(1, 50, 4, 4, 4);
  InternedGraph b = testing::RandomGraph(1, 50, 4, 4, 4);
  EXPECT_EQ(a.vocab.Hash(), b.vocab.Hash());
  b.vocab.AddEntity("extra", EntityKind::kMedicine);
  EXPECT_NE(a.vocab.Hash(), b.vocab.Hash());
}

TEST(DemoMask, ParseAndLabels) {
  const auto all = DemoMask::AllNonEmpty();
  ASSERT_EQ(all.size(), 7u);
  std::set<uint8_t> bits;
  for (DemoMask m : all) {
    bits.insert(m.bits);
    EXPECT_EQ(DemoMask::Parse(m.Label()), m);
  }
  EXPECT_EQ(bits.size(), 7u);
  EXPECT_EQ(DemoMask::Parse("age").bits, 2);
  EXPECT_EQ(DemoMask::Parse("G+E").bits, 5);
  EXPECT_THROW(DemoMask::Parse("height"), Error);
}

}  // namespace
}  // namespace darling
