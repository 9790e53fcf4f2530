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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "darling/error.h"
#include "darling/io.h"
#include "darling/rng.h"

namespace darling {

std::string_view KindName(EntityKind kind) {
  switch (kind) {
    case EntityKind::kDisease:
      return "disease";
    case EntityKind::kTreatment:
      return "treatment";
    case EntityKind::kMedicine:
      return "medicine";
  }
  return "?";
}

EntityKind ParseKind(std::string_view name) {
  const std::string n = ToLower(Trim(name));
  if (n == "disease") return EntityKind::kDisease;
  if (n == "treatment" || n == "procedure") return EntityKind::kTreatment;
  if (n == "medicine") return EntityKind::kMedicine;
  throw Error(ErrorCode::kParseError, "unknown entity kind '" + n + "'");
}

std::optional<EntityKind> DefaultTailKind(std::string_view relation) {
  if (relation == kDiseaseToTreatment) return EntityKind::kTreatment;
  if (relation == kDiseaseToMedicine) return EntityKind::kMedicine;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DemoScheme

DemoScheme DemoScheme::Default() {
  DemoScheme s;
  s.genders = {"male", "female"};
  s.age_groups = {{0, 18, "[0-18)"},   {18, 48, "[18-48)"}, {48, 60, "[48-60)"},
                  {60, 70, "[60-70)"}, {70, 80, "[70-80)"}, {80, -1, ">=80"}};
  s.ethnicities = {"white",  "black", "asian",  "hispanic",
                   "native", "other", "unknown"};
  s.ethnicity_fallback = "unknown";
  return s;
}

void DemoScheme::Validate() const {
  if (genders.empty() || age_groups.empty() || ethnicities.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "empty demographic alphabet");
  }
  if (age_groups.front().min_years != 0) {
    throw Error(ErrorCode::kInvalidConfig, "age groups must start at 0");
  }
  for (std::size_t i = 0; i < age_groups.size(); ++i) {
    const AgeGroup& g = age_groups[i];
    const bool last = i + 1 == age_groups.size();
    if (last) {
      if (g.max_years >= 0) {
        throw Error(ErrorCode::kInvalidConfig,
                    "last age group must be unbounded");
      }
    } else {
      if (g.max_years <= g.min_years) {
        throw Error(ErrorCode::kInvalidConfig,
                    "age group '" + g.label + "' is empty or unbounded");
      }
      if (age_groups[i + 1].min_years != g.max_years) {
        throw Error(ErrorCode::kInvalidConfig,
                    "age groups must be contiguous at " + g.label);
      }
    }
  }
  if (EthnicityIndex(ethnicity_fallback) < 0) {
    throw Error(ErrorCode::kInvalidConfig, "ethnicity fallback '" +
                                               ethnicity_fallback +
                                               "' is not in the alphabet");
  }
}

namespace {

int IndexOf(const std::vector<std::string>& alphabet, std::string_view v) {
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet[i] == v) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

int DemoScheme::GenderIndex(std::string_view gender) const {
  return IndexOf(genders, gender);
}

int DemoScheme::AgeGroupIndex(std::string_view label) const {
  for (std::size_t i = 0; i < age_groups.size(); ++i) {
    if (age_groups[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

int DemoScheme::EthnicityIndex(std::string_view ethnicity) const {
  return IndexOf(ethnicities, ethnicity);
}

int DemoScheme::AgeGroupForYears(int years) const {
  for (std::size_t i = 0; i < age_groups.size(); ++i) {
    const AgeGroup& g = age_groups[i];
    if (years >= g.min_years && (g.max_years < 0 || years < g.max_years)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

// ---------------------------------------------------------------------------
// DemoMask

std::string DemoMask::Label() const {
  switch (bits & 7) {
    case 1:
      return "Gender";
    case 2:
      return "Age";
    case 4:
      return "Ethnicity";
    case 3:
      return "G+A";
    case 5:
      return "G+E";
    case 6:
      return "A+E";
    case 7:
      return "all";
    default:
      return "none";
  }
}

DemoMask DemoMask::Parse(std::string_view text) {
  const std::string t = ToLower(Trim(text));
  for (const DemoMask m : AllNonEmpty()) {
    if (ToLower(m.Label()) == t) return m;
  }
  DemoMask m{0};
  for (const std::string& part : SplitString(t, ',')) {
    const std::string p(Trim(part));
    if (p == "gender" || p == "g") {
      m.bits |= 1;
    } else if (p == "age" || p == "a") {
      m.bits |= 2;
    } else if (p == "ethnicity" || p == "e") {
      m.bits |= 4;
    } else if (!p.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "unknown demographic category '" + p + "'");
    }
  }
  return m;
}

std::vector<DemoMask> DemoMask::AllNonEmpty() {
  return {DemoMask{1}, DemoMask{2}, DemoMask{4}, DemoMask{3},
          DemoMask{5}, DemoMask{6}, DemoMask{7}};
}

// ---------------------------------------------------------------------------
// Demo tuples

DemoTuple ToTuple(const DemographicSet& set, const DemoScheme& scheme) {
  DemoTuple t;
  t.gender = set.gender < 0 ? "*" : scheme.genders.at(set.gender);
  t.age_group = set.age < 0 ? "*" : scheme.age_groups.at(set.age).label;
  t.ethnicity = set.ethnicity < 0 ? "*" : scheme.ethnicities.at(set.ethnicity);
  return t;
}

std::string DemoLabel(const DemographicSet& set, const DemoScheme& scheme) {
  const DemoTuple t = ToTuple(set, scheme);
  return t.gender + "|" + t.age_group + "|" + t.ethnicity;
}

DemographicSet FromTuple(const DemoTuple& tuple, const DemoScheme& scheme) {
  auto resolve = [](const std::string& value, int index, const char* what) {
    if (value == "*") return DemographicSet::kWildcard;
    if (index < 0) {
      throw Error(ErrorCode::kUnknownDemographicValue,
                  std::string(what) + " '" + value + "' not in alphabet");
    }
    return index;
  };
  DemographicSet s;
  s.gender = resolve(tuple.gender, scheme.GenderIndex(tuple.gender), "gender");
  s.age = resolve(tuple.age_group, scheme.AgeGroupIndex(tuple.age_group),
                  "age group");
  s.ethnicity = resolve(tuple.ethnicity, scheme.EthnicityIndex(tuple.ethnicity),
                        "ethnicity");
  return s;
}

DemoTuple ParseDemoTuple(std::string_view label) {
  const auto parts = SplitString(label, '|');
  if (parts.size() != 3) {
    throw Error(ErrorCode::kParseError,
                "demographic tuple '" + std::string(label) +
                    "' must have 3 '|'-separated fields");
  }
  return {std::string(Trim(parts[0])), std::string(Trim(parts[1])),
          std::string(Trim(parts[2]))};
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(DemoScheme scheme) : scheme_(std::move(scheme)) {}

EntityId Vocabulary::AddEntity(const std::string& code, EntityKind kind,
                               std::optional<std::string> external_code) {
  if (code.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty entity code");
  }
  if (auto it = entity_index_.find(code); it != entity_index_.end()) {
    const EntityRecord& rec = entities_[it->second];
    if (rec.kind != kind) {
      throw Error(ErrorCode::kTypeViolation,
                  "entity '" + code + "' is a " +
                      std::string(KindName(rec.kind)) + ", used as " +
                      std::string(KindName(kind)));
    }
    return EntityId(it->second);
  }
  const auto id = static_cast<uint32_t>(entities_.size());
  entities_.push_back({code, kind, std::move(external_code)});
  entity_index_.emplace(code, id);
  return EntityId(id);
}

RelationId Vocabulary::AddRelation(const std::string& name,
                                   EntityKind tail_kind) {
  if (name.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty relation name");
  }
  if (auto it = relation_index_.find(name); it != relation_index_.end()) {
    if (relations_[it->second].tail_kind != tail_kind) {
      throw Error(ErrorCode::kTypeViolation,
                  "relation '" + name + "' used with two tail kinds");
    }
    return RelationId(it->second);
  }
  const auto id = static_cast<uint32_t>(relations_.size());
  relations_.push_back({name, tail_kind});
  relation_index_.emplace(name, id);
  return RelationId(id);
}

DemoSetId Vocabulary::AddDemoSet(const DemographicSet& set) {
  if (auto it = demo_index_.find(set); it != demo_index_.end()) {
    return DemoSetId(it->second);
  }
  const auto id = static_cast<uint32_t>(demo_sets_.size());
  demo_sets_.push_back(set);
  demo_index_.emplace(set, id);
  return DemoSetId(id);
}

std::optional<EntityId> Vocabulary::FindEntity(std::string_view code) const {
  auto it = entity_index_.find(std::string(code));
  if (it == entity_index_.end()) return std::nullopt;
  return EntityId(it->second);
}

std::optional<RelationId> Vocabulary::FindRelation(
    std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return RelationId(it->second);
}

std::optional<DemoSetId> Vocabulary::FindDemoSet(
    const DemographicSet& set) const {
  auto it = demo_index_.find(set);
  if (it == demo_index_.end()) return std::nullopt;
  return DemoSetId(it->second);
}

std::vector<EntityId> Vocabulary::EntitiesOfKind(EntityKind kind) const {
  std::vector<EntityId> out;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (entities_[i].kind == kind) out.emplace_back(static_cast<uint32_t>(i));
  }
  return out;
}

uint64_t Vocabulary::Hash() const {
  std::string buf;
  for (const auto& g : scheme_.genders) buf += "g:" + g + "\n";
  for (const auto& a : scheme_.age_groups) {
    buf += "a:" + a.label + ":" + std::to_string(a.min_years) + ":" +
           std::to_string(a.max_years) + "\n";
  }
  for (const auto& e : scheme_.ethnicities) buf += "t:" + e + "\n";
  buf += "f:" + scheme_.ethnicity_fallback + "\n";
  for (const auto& e : entities_) {
    buf += "E:" + e.code + "\t" + std::string(KindName(e.kind)) + "\t" +
           e.external_code.value_or("-") + "\n";
  }
  for (const auto& r : relations_) {
    buf += "R:" + r.name + "\t" + std::string(KindName(r.tail_kind)) + "\n";
  }
  for (const auto& c : demo_sets_) {
    buf += "C:" + std::to_string(c.gender) + "," + std::to_string(c.age) + "," +
           std::to_string(c.ethnicity) + "\n";
  }
  return Fnv1a(buf);
}

// ---------------------------------------------------------------------------
// QuadrupleStore

std::size_t TripleHash::operator()(const Triple& t) const {
  uint64_t h = SplitMix64(t.head.value);
  h = SplitMix64(h ^ t.relation.value);
  h = SplitMix64(h ^ t.tail.value);
  return static_cast<std::size_t>(h);
}

std::size_t QuadrupleStore::QuadKeyHash::operator()(
    const std::pair<Triple, uint32_t>& k) const {
  return static_cast<std::size_t>(
      SplitMix64(TripleHash{}(k.first) ^ (uint64_t{k.second} << 1)));
}

void QuadrupleStore::Add(const Quadruple& quad) {
  if (!(quad.probability > 0.0 && quad.probability <= 1.0)) {
    throw Error(
        ErrorCode::kInvalidArgument,
        "probability " + FormatDouble(quad.probability) + " outside (0, 1]");
  }
  const auto key = std::make_pair(quad.triple(), quad.demo.value);
  if (!quad_keys_.insert(key).second) {
    throw Error(ErrorCode::kDuplicateQuadruple,
                "(" + std::to_string(quad.head.value) + ", " +
                    std::to_string(quad.relation.value) + ", " +
                    std::to_string(quad.tail.value) + ", " +
                    std::to_string(quad.demo.value) + ") already present");
  }
  ++triple_index_[quad.triple()];
  by_demo_[quad.demo.value].push_back(quads_.size());
  quads_.push_back(quad);
}

bool QuadrupleStore::Contains(const Quadruple& quad) const {
  return quad_keys_.contains(std::make_pair(quad.triple(), quad.demo.value));
}

TripleIndex QuadrupleStore::RebuildTripleIndex() const {
  TripleIndex index;
  for (const Quadruple& q : quads_) ++index[q.triple()];
  return index;
}

std::span<const std::size_t> QuadrupleStore::QuadsForDemo(
    DemoSetId demo) const {
  auto it = by_demo_.find(demo.value);
  if (it == by_demo_.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------
// Interning

namespace {

struct KindHint {
  EntityKind kind;
  std::optional<std::string> external;
};

std::unordered_map<std::string, KindHint> BuildHints(
    std::span<const EntityRecord> table) {
  std::unordered_map<std::string, KindHint> hints;
  for (const EntityRecord& rec : table) {
    auto [it, inserted] =
        hints.emplace(rec.code, KindHint{rec.kind, rec.external_code});
    if (!inserted) {
      throw Error(ErrorCode::kInvalidArgument,
                  "entity table lists '" + rec.code + "' twice");
    }
  }
  return hints;
}

EntityId InternEntity(Vocabulary& vocab,
                      const std::unordered_map<std::string, KindHint>& hints,
                      const std::string& code, EntityKind positional_kind) {
  if (code.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty entity code");
  }
  auto it = hints.find(code);
  if (it == hints.end()) return vocab.AddEntity(code, positional_kind);
  if (it->second.kind != positional_kind) {
    throw Error(ErrorCode::kTypeViolation,
                "entity '" + code + "' has kind " +
                    std::string(KindName(it->second.kind)) +
                    " but is used as " +
                    std::string(KindName(positional_kind)));
  }
  return vocab.AddEntity(code, it->second.kind, it->second.external);
}

}  // namespace

QuadrupleStore InternInto(Vocabulary& vocab, std::span<const RawQuad> raw,
                          std::span<const EntityRecord> entity_table) {
  const auto hints = BuildHints(entity_table);
  QuadrupleStore store;
  for (const RawQuad& rq : raw) {
    if (rq.relation.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty relation name");
    }
    // Relation tail kind: the standard names fix it; otherwise the tail's
    // declared kind decides.
    EntityKind tail_kind;
    if (auto known = vocab.FindRelation(rq.relation)) {
      tail_kind = vocab.relation(*known).tail_kind;
    } else if (auto def = DefaultTailKind(rq.relation)) {
      tail_kind = *def;
    } else if (auto h = hints.find(rq.tail); h != hints.end()) {
      tail_kind = h->second.kind;
    } else {
      throw Error(ErrorCode::kTypeViolation,
                  "cannot infer tail kind of relation '" + rq.relation + "'");
    }
    if (tail_kind == EntityKind::kDisease) {
      throw Error(ErrorCode::kTypeViolation,
                  "relation '" + rq.relation + "' cannot target a disease");
    }
    const DemographicSet demo = FromTuple(rq.demo, vocab.scheme());
    const EntityId head =
        InternEntity(vocab, hints, rq.head, EntityKind::kDisease);
    const RelationId rel = vocab.AddRelation(rq.relation, tail_kind);
    const EntityId tail = InternEntity(vocab, hints, rq.tail, tail_kind);
    const DemoSetId demo_id = vocab.AddDemoSet(demo);
    store.Add({head, rel, tail, demo_id, rq.probability});
  }
  return store;
}

InternedGraph InternGraph(std::span<const RawQuad> raw, DemoScheme scheme,
                          std::span<const EntityRecord> entity_table) {
  scheme.Validate();
  InternedGraph g{Vocabulary(std::move(scheme)), {}};
  g.store = InternInto(g.vocab, raw, entity_table);
  return g;
}

std::vector<RawQuad> DeIntern(const Vocabulary& vocab,
                              const QuadrupleStore& store) {
  std::vector<RawQuad> out;
  out.reserve(store.size());
  for (const Quadruple& q : store.quads()) {
    out.push_back({vocab.entity(q.head).code, vocab.relation(q.relation).name,
                   vocab.entity(q.tail).code,
                   ToTuple(vocab.demo_set(q.demo), vocab.scheme()),
                   q.probability});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting

namespace {

// Coverage counts of every id in the train partition.
struct Coverage {
  std::unordered_map<uint32_t, int> entity, relation, demo;

  void Add(const Quadruple& q, int delta) {
    entity[q.head.value] += delta;
    entity[q.tail.value] += delta;
    relation[q.relation.value] += delta;
    demo[q.demo.value] += delta;
  }
  bool Covers(const Quadruple& q) const {
    auto has = [](const std::unordered_map<uint32_t, int>& m, uint32_t k) {
      auto it = m.find(k);
      return it != m.end() && it->second > 0;
    };
    return has(entity, q.head.value) && has(entity, q.tail.value) &&
           has(relation, q.relation.value) && has(demo, q.demo.value);
  }
  // True when removing q from train leaves all of its ids covered.
  bool Removable(const Quadruple& q) const {
    auto count = [](const std::unordered_map<uint32_t, int>& m, uint32_t k) {
      auto it = m.find(k);
      return it == m.end() ? 0 : it->second;
    };
    return count(entity, q.head.value) >= 2 &&
           count(entity, q.tail.value) >= 2 &&
           count(relation, q.relation.value) >= 2 &&
           count(demo, q.demo.value) >= 2;
  }
};

}  // namespace

DatasetSplit SplitDataset(const QuadrupleStore& store, SplitRatios ratios,
                          uint64_t seed) {
  if (ratios.valid + ratios.test >= 1.0 || ratios.train <= 0.0) {
    throw Error(ErrorCode::kInfeasibleSplit,
                "valid + test ratio must be below 1");
  }
  if (ratios.valid <= 0.0 || ratios.test <= 0.0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "split ratios must be positive and sum to 1");
  }
  const std::size_t n = store.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Fisher-Yates with our own index draw keeps the permutation independent
  // of the standard library's shuffle implementation.
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[UniformIndex(rng, i)]);
  }

  const auto n_valid = static_cast<std::size_t>(std::llround(n * ratios.valid));
  const auto n_test = static_cast<std::size_t>(std::llround(n * ratios.test));
  const std::size_t n_train = n - std::min(n, n_valid + n_test);

  // 0 = train, 1 = valid, 2 = test; indexed by position in `order`.
  std::vector<int> part(n);
  for (std::size_t i = 0; i < n; ++i) {
    part[i] = i < n_train ? 0 : (i < n_train + n_valid ? 1 : 2);
  }

  Coverage cov;
  for (std::size_t i = 0; i < n; ++i) {
    if (part[i] == 0) cov.Add(store[order[i]], +1);
  }
  // Pull orphans into train, remembering which partition each came from.
  std::vector<int> deficits;
  for (std::size_t i = 0; i < n; ++i) {
    if (part[i] != 0 && !cov.Covers(store[order[i]])) {
      deficits.push_back(part[i]);
      part[i] = 0;
      cov.Add(store[order[i]], +1);
    }
  }
  // Refill from train, scanning from the end of the shuffled train block.
  for (std::size_t i = n; i-- > 0 && !deficits.empty();) {
    if (part[i] != 0) continue;
    const Quadruple& q = store[order[i]];
    if (!cov.Removable(q)) continue;
    cov.Add(q, -1);
    part[i] = deficits.back();
    deficits.pop_back();
  }

  DatasetSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    const Quadruple& q = store[order[i]];
    (part[i] == 0   ? split.train
     : part[i] == 1 ? split.valid
                    : split.test)
        .Add(q);
  }
  return split;
}

bool SplitInvariantsHold(const DatasetSplit& split) {
  const QuadrupleStore* stores[] = {&split.train, &split.valid, &split.test};
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (const Quadruple& q : stores[a]->quads()) {
        if (stores[b]->Contains(q)) return false;
      }
    }
  }
  Coverage cov;
  for (const Quadruple& q : split.train.quads()) cov.Add(q, +1);
  for (const QuadrupleStore* s : {&split.valid, &split.test}) {
    for (const Quadruple& q : s->quads()) {
      if (!cov.Covers(q)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// TSV

namespace {

double ParseProbability(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) +
                                            ": bad probability '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<RawQuad> ParseQuadTsv(std::string_view text) {
  std::vector<RawQuad> out;
  std::size_t line_no = 0;
  for (const std::string& raw_line : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = raw_line;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = SplitString(line, '\t');
    if (cols.size() != 5) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected 5 columns");
    }
    RawQuad q;
    q.head = cols[0];
    q.relation = cols[1];
    q.tail = cols[2];
    q.demo = ParseDemoTuple(cols[3]);
    q.probability = ParseProbability(cols[4], line_no);
    out.push_back(std::move(q));
  }
  return out;
}

std::string FormatQuadTsv(std::span<const RawQuad> quads) {
  std::string out =
      "# head\trelation\ttail\tgender|age_group|ethnic_group\tprobability\n";
  char prob[40];
  for (const RawQuad& q : quads) {
    std::snprintf(prob, sizeof(prob), "%.12g", q.probability);
    out += q.head + "\t" + q.relation + "\t" + q.tail + "\t" + q.demo.gender +
           "|" + q.demo.age_group + "|" + q.demo.ethnicity + "\t" + prob + "\n";
  }
  return out;
}

std::string FormatQuadTsv(const Vocabulary& vocab,
                          const QuadrupleStore& store) {
  return FormatQuadTsv(DeIntern(vocab, store));
}

std::vector<EntityRecord> ParseEntitiesTsv(std::string_view text) {
  std::vector<EntityRecord> out;
  std::size_t line_no = 0;
  for (const std::string& raw_line : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = raw_line;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = SplitString(line, '\t');
    if (cols.size() != 3) {
      throw Error(
          ErrorCode::kParseError,
          "entities line " + std::to_string(line_no) + ": expected 3 columns");
    }
    EntityRecord rec;
    rec.code = cols[0];
    rec.kind = ParseKind(cols[1]);
    if (cols[2] != "-") rec.external_code = cols[2];
    out.push_back(std::move(rec));
  }
  return out;
}

std::string FormatEntitiesTsv(std::span<const EntityRecord> entities) {
  std::string out = "# code\tkind\texternal_code\n";
  for (const EntityRecord& e : entities) {
    out += e.code + "\t" + std::string(KindName(e.kind)) + "\t" +
           e.external_code.value_or("-") + "\n";
  }
  return out;
}

}  // namespace darling
