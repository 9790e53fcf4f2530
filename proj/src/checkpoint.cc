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

#include "darling/checkpoint.h"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>

#include "darling/error.h"
#include "darling/io.h"

namespace darling {

namespace {

constexpr std::string_view kMagic = "darling-checkpoint\t1";

std::string Hex(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

double ParseDouble(std::string_view s) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (end == str.c_str() || *end != '\0') {
    throw Error(ErrorCode::kParseError, "bad number '" + str + "'");
  }
  return v;
}

long ParseInt(std::string_view s) {
  const std::string str(s);
  char* end = nullptr;
  const long v = std::strtol(str.c_str(), &end, 10);
  if (end == str.c_str() || *end != '\0') {
    throw Error(ErrorCode::kParseError, "bad integer '" + str + "'");
  }
  return v;
}

bool ParseBool(std::string_view s) {
  const std::string v = ToLower(s);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kParseError, "bad boolean '" + std::string(s) + "'");
}

}  // namespace

std::string FormatModelConfig(const ModelConfig& c) {
  std::string out;
  out += "family=" + std::string(FamilyName(c.family)) + "\n";
  out += "dim=" + std::to_string(c.dim) + "\n";
  out += "norm=" + std::to_string(c.norm) + "\n";
  out += "margin=" + FormatDouble(c.margin) + "\n";
  out += "lambda=" + FormatDouble(c.lambda) + "\n";
  out += "eps_pos=" + FormatDouble(c.eps_pos) + "\n";
  out += "eps_neg=" + FormatDouble(c.eps_neg) + "\n";
  out += "demo_mask=" + c.demo_mask.Label() + "\n";
  out += "entity_norm_constraint=" +
         std::string(c.entity_norm_constraint ? "true" : "false") + "\n";
  return out;
}

void ApplyModelConfigKey(ModelConfig& c, std::string_view key,
                         std::string_view value) {
  if (key == "family") {
    c.family = ParseFamily(value);
  } else if (key == "dim") {
    c.dim = static_cast<int>(ParseInt(value));
  } else if (key == "norm") {
    c.norm = static_cast<int>(ParseInt(value));
  } else if (key == "margin") {
    c.margin = ParseDouble(value);
  } else if (key == "lambda") {
    c.lambda = ParseDouble(value);
  } else if (key == "eps_pos") {
    c.eps_pos = ParseDouble(value);
  } else if (key == "eps_neg") {
    c.eps_neg = ParseDouble(value);
  } else if (key == "demo_mask") {
    c.demo_mask = DemoMask::Parse(value);
  } else if (key == "entity_norm_constraint") {
    c.entity_norm_constraint = ParseBool(value);
  } else {
    throw Error(ErrorCode::kParseError,
                "unknown model config key '" + std::string(key) + "'");
  }
}

std::string SerializeCheckpoint(const Checkpoint& ck) {
  std::string out(kMagic);
  out += "\n";
  for (const std::string& line :
       SplitString(FormatModelConfig(ck.config), '\n')) {
    if (!line.empty()) out += "config\t" + line + "\n";
  }
  out += "vocab_hash\t" + Hex(ck.vocab.Hash()) + "\n";

  const DemoScheme& s = ck.vocab.scheme();
  for (const auto& g : s.genders) out += "gender\t" + g + "\n";
  for (const auto& a : s.age_groups) {
    out += "age_group\t" + a.label + "\t" + std::to_string(a.min_years) + "\t" +
           std::to_string(a.max_years) + "\n";
  }
  for (const auto& e : s.ethnicities) out += "ethnicity\t" + e + "\n";
  out += "ethnicity_fallback\t" + s.ethnicity_fallback + "\n";
  for (const auto& e : ck.vocab.entities()) {
    out += "entity\t" + e.code + "\t" + std::string(KindName(e.kind)) + "\t" +
           e.external_code.value_or("-") + "\n";
  }
  for (const auto& r : ck.vocab.relations()) {
    out += "relation\t" + r.name + "\t" + std::string(KindName(r.tail_kind)) +
           "\n";
  }
  for (const auto& c : ck.vocab.demo_sets()) {
    out += "demo_set\t" + std::to_string(c.gender) + "\t" +
           std::to_string(c.age) + "\t" + std::to_string(c.ethnicity) + "\n";
  }
  out += "dim\t" + std::to_string(ck.store.dim) + "\n";
  for (std::size_t t = 0; t < kNumParamTables; ++t) {
    const Matrix& m = ck.store.tables[t];
    out += "table\t" + std::string(TableName(static_cast<ParamTable>(t))) +
           "\t" + std::to_string(m.rows()) + "\t" + std::to_string(m.cols()) +
           "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out += ' ';
        out += FormatDouble(row[j]);
      }
      out += "\n";
    }
  }
  out += "end\n";
  return out;
}

Checkpoint ParseCheckpoint(std::string_view text) {
  const auto lines = SplitString(text, '\n');
  std::size_t i = 0;
  auto next = [&]() -> const std::string& {
    if (i >= lines.size()) {
      throw Error(ErrorCode::kParseError, "truncated checkpoint");
    }
    return lines[i++];
  };
  if (next() != kMagic) {
    throw Error(ErrorCode::kParseError, "not a checkpoint file");
  }

  ModelConfig config;
  DemoScheme scheme;
  scheme.ethnicity_fallback.clear();
  std::vector<EntityRecord> entities;
  std::vector<RelationRecord> relations;
  std::vector<DemographicSet> demo_sets;
  std::string recorded_hash;
  EmbeddingStore store;
  bool have_dim = false;
  bool done = false;

  while (!done) {
    const std::string& line = next();
    if (line.empty()) continue;
    const auto cols = SplitString(line, '\t');
    const std::string& tag = cols[0];
    auto need = [&](std::size_t n) {
      if (cols.size() != n) {
        throw Error(ErrorCode::kParseError,
                    "checkpoint line " + std::to_string(i) + ": expected " +
                        std::to_string(n) + " fields");
      }
    };
    if (tag == "config") {
      need(2);
      const auto eq = cols[1].find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kParseError, "bad config line");
      }
      ApplyModelConfigKey(config, cols[1].substr(0, eq),
                          cols[1].substr(eq + 1));
    } else if (tag == "vocab_hash") {
      need(2);
      recorded_hash = cols[1];
    } else if (tag == "gender") {
      need(2);
      scheme.genders.push_back(cols[1]);
    } else if (tag == "age_group") {
      need(4);
      scheme.age_groups.push_back({static_cast<int>(ParseInt(cols[2])),
                                   static_cast<int>(ParseInt(cols[3])),
                                   cols[1]});
    } else if (tag == "ethnicity") {
      need(2);
      scheme.ethnicities.push_back(cols[1]);
    } else if (tag == "ethnicity_fallback") {
      need(2);
      scheme.ethnicity_fallback = cols[1];
    } else if (tag == "entity") {
      need(4);
      EntityRecord e{cols[1], ParseKind(cols[2]), std::nullopt};
      if (cols[3] != "-") e.external_code = cols[3];
      entities.push_back(std::move(e));
    } else if (tag == "relation") {
      need(3);
      relations.push_back({cols[1], ParseKind(cols[2])});
    } else if (tag == "demo_set") {
      need(4);
      demo_sets.push_back({static_cast<int>(ParseInt(cols[1])),
                           static_cast<int>(ParseInt(cols[2])),
                           static_cast<int>(ParseInt(cols[3]))});
    } else if (tag == "dim") {
      need(2);
      store.dim = static_cast<int>(ParseInt(cols[1]));
      have_dim = true;
    } else if (tag == "table") {
      need(4);
      std::size_t t = 0;
      while (t < kNumParamTables &&
             TableName(static_cast<ParamTable>(t)) != cols[1]) {
        ++t;
      }
      if (t == kNumParamTables) {
        throw Error(ErrorCode::kParseError, "unknown table '" + cols[1] + "'");
      }
      const auto rows = static_cast<std::size_t>(ParseInt(cols[2]));
      const auto ncols = static_cast<std::size_t>(ParseInt(cols[3]));
      Matrix m(rows, ncols);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto values = SplitString(next(), ' ');
        if (values.size() != ncols) {
          throw Error(ErrorCode::kCheckpointMismatch,
                      "table " + cols[1] + " row " + std::to_string(r) +
                          " has " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(ncols));
        }
        auto row = m.row(r);
        for (std::size_t j = 0; j < ncols; ++j) row[j] = ParseDouble(values[j]);
      }
      store.tables[t] = std::move(m);
    } else if (tag == "end") {
      done = true;
    } else {
      throw Error(ErrorCode::kParseError,
                  "unknown checkpoint tag '" + tag + "'");
    }
  }

  Checkpoint ck{config, Vocabulary(scheme), {}};
  for (const auto& e : entities) {
    ck.vocab.AddEntity(e.code, e.kind, e.external_code);
  }
  for (const auto& r : relations) ck.vocab.AddRelation(r.name, r.tail_kind);
  for (const auto& c : demo_sets) ck.vocab.AddDemoSet(c);
  if (Hex(ck.vocab.Hash()) != recorded_hash) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "vocabulary hash " + Hex(ck.vocab.Hash()) +
                    " does not match recorded " + recorded_hash);
  }
  if (!have_dim || store.dim != config.dim) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "table dimension disagrees with config dim");
  }
  const std::size_t d = static_cast<std::size_t>(config.dim);
  const auto& ent = store.table(ParamTable::kEntity);
  const auto& rel = store.table(ParamTable::kRelation);
  if (ent.rows() != ck.vocab.num_entities() || ent.cols() != d ||
      rel.rows() != ck.vocab.num_relations() || rel.cols() != d) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "entity/relation tables do not match vocabulary and dim");
  }
  for (const Matrix& m : store.tables) {
    if (m.rows() > 0 && m.cols() != d && m.cols() != d * d) {
      throw Error(ErrorCode::kCheckpointMismatch, "table width mismatch");
    }
  }
  ck.store = std::move(store);
  return ck;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint) {
  WriteFileAtomic(path, SerializeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::string& path,
                          const Vocabulary* expected_vocab) {
  Checkpoint ck = ParseCheckpoint(ReadFile(path));
  if (expected_vocab != nullptr && expected_vocab->Hash() != ck.vocab.Hash()) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "checkpoint was trained on a different vocabulary");
  }
  return ck;
}

}  // namespace darling
