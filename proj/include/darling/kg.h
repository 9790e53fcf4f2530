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

#ifndef DARLING_KG_H_
#define DARLING_KG_H_

// Quadruple knowledge graph: interned vocabularies, the (h, r, t, c) store
// with its membership indexes, dataset splits and the canonical TSV format.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace darling {

enum class EntityKind : uint8_t { kDisease, kTreatment, kMedicine };

std::string_view KindName(EntityKind kind);
EntityKind ParseKind(std::string_view name);

template <class Tag>
struct Id {
  uint32_t value = 0;
  constexpr Id() = default;
  constexpr explicit Id(uint32_t v) : value(v) {}
  friend constexpr auto operator<=>(Id, Id) = default;
};

using EntityId = Id<struct EntityTag>;
using RelationId = Id<struct RelationTag>;
using DemoSetId = Id<struct DemoSetTag>;

inline constexpr std::string_view kDiseaseToTreatment = "Disease_to_Treatment";
inline constexpr std::string_view kDiseaseToMedicine = "Disease_to_Medicine";

// Tail kind implied by one of the two standard relation names.
std::optional<EntityKind> DefaultTailKind(std::string_view relation);

// ---------------------------------------------------------------------------
// Demographics

// Half-open [min_years, max_years); max_years < 0 means unbounded.
struct AgeGroup {
  int min_years = 0;
  int max_years = -1;
  std::string label;
};

struct DemoScheme {
  std::vector<std::string> genders;
  std::vector<AgeGroup> age_groups;
  std::vector<std::string> ethnicities;
  // Ethnicity strings outside the alphabet map here. Must be a member of
  // `ethnicities`.
  std::string ethnicity_fallback;

  // 2 genders, 6 age groups, 7 ethnic groups.
  static DemoScheme Default();

  // Throws kInvalidConfig unless age groups are ordered, disjoint and cover
  // [0, inf), and every alphabet is non-empty.
  void Validate() const;

  int GenderIndex(std::string_view gender) const;
  int AgeGroupIndex(std::string_view label) const;
  int EthnicityIndex(std::string_view ethnicity) const;
  int AgeGroupForYears(int years) const;
};

enum class DemoCategory : uint8_t { kGender = 1, kAge = 2, kEthnicity = 4 };

// Subset of demographic categories kept when building hyperplanes.
struct DemoMask {
  uint8_t bits = 7;

  bool Has(DemoCategory c) const { return bits & static_cast<uint8_t>(c); }
  bool empty() const { return (bits & 7) == 0; }

  // "all", "Gender", "Age", "Ethnicity", "G+A", "G+E", "A+E".
  std::string Label() const;
  // Accepts Label() output, or a comma-separated list of gender/age/ethnicity.
  static DemoMask Parse(std::string_view text);
  // The 7 non-empty subsets in presentation order (singletons, pairs, all).
  static std::vector<DemoMask> AllNonEmpty();

  friend bool operator==(DemoMask, DemoMask) = default;
};

struct DemographicSet {
  static constexpr int kWildcard = -1;
  int gender = kWildcard;
  int age = kWildcard;
  int ethnicity = kWildcard;

  friend auto operator<=>(const DemographicSet&,
                          const DemographicSet&) = default;
};

// String form used at the file boundary: values are alphabet labels, "*"
// marks a masked-out category.
struct DemoTuple {
  std::string gender;
  std::string age_group;
  std::string ethnicity;

  friend bool operator==(const DemoTuple&, const DemoTuple&) = default;
};

// "gender|age_group|ethnic_group".
std::string DemoLabel(const DemographicSet& set, const DemoScheme& scheme);
DemoTuple ToTuple(const DemographicSet& set, const DemoScheme& scheme);
// Throws kUnknownDemographicValue for labels outside the alphabets.
DemographicSet FromTuple(const DemoTuple& tuple, const DemoScheme& scheme);
DemoTuple ParseDemoTuple(std::string_view label);

// ---------------------------------------------------------------------------
// Vocabulary

struct EntityRecord {
  std::string code;
  EntityKind kind = EntityKind::kDisease;
  std::optional<std::string> external_code;
};

struct RelationRecord {
  std::string name;
  EntityKind tail_kind = EntityKind::kTreatment;
};

class Vocabulary {
 public:
  Vocabulary() : Vocabulary(DemoScheme::Default()) {}
  explicit Vocabulary(DemoScheme scheme);

  const DemoScheme& scheme() const { return scheme_; }

  // Returns the existing id when `code` is known; throws kTypeViolation if
  // the known kind differs.
  EntityId AddEntity(const std::string& code, EntityKind kind,
                     std::optional<std::string> external_code = std::nullopt);
  RelationId AddRelation(const std::string& name, EntityKind tail_kind);
  DemoSetId AddDemoSet(const DemographicSet& set);

  std::optional<EntityId> FindEntity(std::string_view code) const;
  std::optional<RelationId> FindRelation(std::string_view name) const;
  std::optional<DemoSetId> FindDemoSet(const DemographicSet& set) const;

  const EntityRecord& entity(EntityId id) const { return entities_[id.value]; }
  const RelationRecord& relation(RelationId id) const {
    return relations_[id.value];
  }
  const DemographicSet& demo_set(DemoSetId id) const {
    return demo_sets_[id.value];
  }

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_demo_sets() const { return demo_sets_.size(); }

  std::span<const EntityRecord> entities() const { return entities_; }
  std::span<const RelationRecord> relations() const { return relations_; }
  std::span<const DemographicSet> demo_sets() const { return demo_sets_; }

  // Ascending ids of every entity of `kind`.
  std::vector<EntityId> EntitiesOfKind(EntityKind kind) const;

  // FNV-1a over the canonical serialization of all three tables and the
  // scheme; checkpoints record it to detect mismatched data.
  uint64_t Hash() const;

 private:
  DemoScheme scheme_;
  std::vector<EntityRecord> entities_;
  std::vector<RelationRecord> relations_;
  std::vector<DemographicSet> demo_sets_;
  std::unordered_map<std::string, uint32_t> entity_index_;
  std::unordered_map<std::string, uint32_t> relation_index_;
  std::map<DemographicSet, uint32_t> demo_index_;
};

// ---------------------------------------------------------------------------
// Quadruples

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const;
};

struct Quadruple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  DemoSetId demo;
  double probability = 1.0;

  Triple triple() const { return {head, relation, tail}; }
};

// (h, r, t) -> number of demographic sets the triple is stored under.
using TripleIndex = std::unordered_map<Triple, uint32_t, TripleHash>;

class QuadrupleStore {
 public:
  // Throws kDuplicateQuadruple on a repeated (h, r, t, c) and
  // kInvalidArgument on a probability outside (0, 1].
  void Add(const Quadruple& quad);

  bool ContainsTriple(const Triple& triple) const {
    return triple_index_.contains(triple);
  }
  bool Contains(const Quadruple& quad) const;

  std::span<const Quadruple> quads() const { return quads_; }
  std::size_t size() const { return quads_.size(); }
  bool empty() const { return quads_.empty(); }
  const Quadruple& operator[](std::size_t i) const { return quads_[i]; }

  const TripleIndex& triple_index() const { return triple_index_; }
  TripleIndex RebuildTripleIndex() const;

  // Positions of quads carrying demographic set `demo`, in insertion order.
  std::span<const std::size_t> QuadsForDemo(DemoSetId demo) const;

 private:
  struct QuadKeyHash {
    std::size_t operator()(const std::pair<Triple, uint32_t>& k) const;
  };

  std::vector<Quadruple> quads_;
  TripleIndex triple_index_;
  std::unordered_set<std::pair<Triple, uint32_t>, QuadKeyHash> quad_keys_;
  std::map<uint32_t, std::vector<std::size_t>> by_demo_;
};

struct DatasetSplit {
  QuadrupleStore train;
  QuadrupleStore valid;
  QuadrupleStore test;
};

// Surface-form quadruple as read from disk or produced by ingestion.
struct RawQuad {
  std::string head;
  std::string relation;
  std::string tail;
  DemoTuple demo;
  double probability = 1.0;
};

struct InternedGraph {
  Vocabulary vocab;
  QuadrupleStore store;
};

// Interns quads in order of first appearance (head before tail within a
// quad). `entity_table` supplies kinds and external codes; codes absent from
// it take the kind implied by their position (head: disease, tail: the
// relation's tail kind).
InternedGraph InternGraph(std::span<const RawQuad> raw, DemoScheme scheme,
                          std::span<const EntityRecord> entity_table = {});

// Interns into an existing vocabulary, extending it.
QuadrupleStore InternInto(Vocabulary& vocab, std::span<const RawQuad> raw,
                          std::span<const EntityRecord> entity_table = {});

std::vector<RawQuad> DeIntern(const Vocabulary& vocab,
                              const QuadrupleStore& store);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.08;
  double test = 0.12;
};

// Seeded shuffle, then orphan retention: a valid/test quad carrying an id
// that would otherwise be absent from train moves to train, and a train quad
// whose ids all stay covered moves back to keep the target sizes.
DatasetSplit SplitDataset(const QuadrupleStore& store, SplitRatios ratios,
                          uint64_t seed);

// Checks pairwise disjointness and train coverage of valid/test ids.
bool SplitInvariantsHold(const DatasetSplit& split);

// ---------------------------------------------------------------------------
// Canonical TSV

std::vector<RawQuad> ParseQuadTsv(std::string_view text);
std::string FormatQuadTsv(std::span<const RawQuad> quads);
std::string FormatQuadTsv(const Vocabulary& vocab, const QuadrupleStore& store);

std::vector<EntityRecord> ParseEntitiesTsv(std::string_view text);
std::string FormatEntitiesTsv(std::span<const EntityRecord> entities);

}  // namespace darling

#endif  // DARLING_KG_H_
