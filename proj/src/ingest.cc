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

#include "darling/ingest.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "darling/error.h"
#include "darling/io.h"
#include "darling/rng.h"

namespace darling {

DemographicSet BucketDemographics(std::string_view gender, int age_years,
                                  std::string_view ethnicity,
                                  const DemoScheme& scheme) {
  DemographicSet set;
  set.gender = scheme.GenderIndex(ToLower(Trim(gender)));
  if (set.gender < 0) {
    throw Error(ErrorCode::kUnknownGender,
                "gender '" + std::string(gender) + "' not in scheme");
  }
  if (age_years < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative age " + std::to_string(age_years));
  }
  set.age = scheme.AgeGroupForYears(age_years);
  if (set.age < 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "age " + std::to_string(age_years) + " not covered by scheme");
  }
  set.ethnicity = scheme.EthnicityIndex(ToLower(Trim(ethnicity)));
  if (set.ethnicity < 0) {
    set.ethnicity = scheme.EthnicityIndex(scheme.ethnicity_fallback);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Counting

void CountingTally::NoteKind(const std::string& code, EntityKind kind) {
  auto [it, inserted] = kinds_.emplace(code, kind);
  if (!inserted && it->second != kind) {
    throw Error(ErrorCode::kTypeViolation,
                "code '" + code + "' appears as both " +
                    std::string(KindName(it->second)) + " and " +
                    std::string(KindName(kind)));
  }
}

void CountingTally::AddAdmission(const AdmissionRecord& record,
                                 const DemoScheme& scheme) {
  const DemographicSet demo = BucketDemographics(
      record.gender, record.age_years, record.ethnicity, scheme);
  const std::string label = DemoLabel(demo, scheme);

  // Presence, not multiplicity: a code repeated within one admission counts
  // once.
  auto distinct = [](const std::vector<std::string>& codes) {
    std::set<std::string> s;
    for (const auto& c : codes) {
      if (!c.empty()) s.insert(c);
    }
    return s;
  };
  const auto diagnoses = distinct(record.diagnoses);
  const auto procedures = distinct(record.procedures);
  const auto medicines = distinct(record.medicines);

  for (const auto& d : diagnoses) NoteKind(d, EntityKind::kDisease);
  for (const auto& p : procedures) NoteKind(p, EntityKind::kTreatment);
  for (const auto& m : medicines) NoteKind(m, EntityKind::kMedicine);

  const std::string treat(kDiseaseToTreatment);
  const std::string med(kDiseaseToMedicine);
  for (const auto& d : diagnoses) {
    ++head_counts_[d];
    for (const auto& p : procedures) ++quad_counts_[{d, treat, p, label}];
    for (const auto& m : medicines) ++quad_counts_[{d, med, m, label}];
  }
}

void CountingTally::Merge(const CountingTally& other) {
  for (const auto& [k, v] : other.quad_counts_) quad_counts_[k] += v;
  for (const auto& [k, v] : other.head_counts_) head_counts_[k] += v;
  for (const auto& [k, v] : other.kinds_) NoteKind(k, v);
}

ExtractedGraph ExtractQuadruples(std::span<const AdmissionRecord> records,
                                 const DemoScheme& scheme, int threads) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no admission records");
  }
  scheme.Validate();
  {
    std::unordered_set<std::string> ids;
    for (const auto& r : records) {
      if (!ids.insert(r.admission_id).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate admission id '" + r.admission_id + "'");
      }
    }
  }

  const int shards = std::max(1, threads);
  std::vector<CountingTally> partial(shards);
  ParallelFor(records.size(), shards,
              [&](std::size_t begin, std::size_t end, int worker) {
                for (std::size_t i = begin; i < end; ++i) {
                  partial[worker].AddAdmission(records[i], scheme);
                }
              });
  ExtractedGraph out;
  for (const auto& p : partial) out.tally.Merge(p);

  out.quads.reserve(out.tally.quad_counts().size());
  for (const auto& [key, count] : out.tally.quad_counts()) {
    const auto& [head, relation, tail, label] = key;
    const int64_t n_head = out.tally.head_counts().at(head);
    out.quads.push_back(
        {head, relation, tail, ParseDemoTuple(label),
         static_cast<double>(count) / static_cast<double>(n_head)});
  }
  for (const auto& [code, kind] : out.tally.kinds()) {
    out.entities.push_back({code, kind, std::nullopt});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

void SyntheticParams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
  };
  require(n_patients >= 1, "n_patients must be >= 1");
  require(n_diseases >= 1, "n_diseases must be >= 1");
  require(n_treatments >= 1, "n_treatments must be >= 1");
  require(n_medicines >= 1, "n_medicines must be >= 1");
  require(min_admissions_per_patient >= 1 &&
              max_admissions_per_patient >= min_admissions_per_patient,
          "admissions-per-patient range must satisfy 1 <= min <= max");
  require(min_diagnoses >= 1 && max_diagnoses >= min_diagnoses,
          "diagnoses range must satisfy 1 <= min <= max");
  require(min_procedures >= 0 && max_procedures >= min_procedures,
          "procedures range must satisfy 0 <= min <= max");
  require(min_medicines >= 0 && max_medicines >= min_medicines,
          "medicines range must satisfy 0 <= min <= max");
  require(signal >= 0.0 && signal <= 1.0, "signal must lie in [0, 1]");
  require(!signal_categories.empty(), "signal categories must be non-empty");
  require(preferred_per_key >= 1, "preferred_per_key must be >= 1");
  require(ethnicity_weights.empty() ||
              ethnicity_weights.size() == scheme.ethnicities.size(),
          "ethnicity weights must match the ethnicity alphabet");
  scheme.Validate();
}

namespace {

std::string Code(char prefix, int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, index + 1);
  return buf;
}

int Width(int n) { return static_cast<int>(std::to_string(n).size()); }

int UniformInt(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(UniformIndex(rng, hi - lo + 1));
}

// Draws k distinct indices from [0, n) (k clipped to n), in draw order.
std::vector<int> SampleDistinct(Rng& rng, int n, int k) {
  k = std::min(k, n);
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(UniformIndex(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

class PlantedPreferences {
 public:
  PlantedPreferences(const SyntheticParams& p, uint64_t seed)
      : params_(p), seed_(DeriveSeed(seed, "preferences")) {
    const DemoScheme& s = p.scheme;
    const DemoMask m = p.signal_categories;
    n_keys_ = (m.Has(DemoCategory::kGender) ? s.genders.size() : 1) *
              (m.Has(DemoCategory::kAge) ? s.age_groups.size() : 1) *
              (m.Has(DemoCategory::kEthnicity) ? s.ethnicities.size() : 1);
  }

  int Key(const DemographicSet& c) const {
    const DemoScheme& s = params_.scheme;
    const DemoMask m = params_.signal_categories;
    int key = 0;
    if (m.Has(DemoCategory::kGender)) key = c.gender;
    if (m.Has(DemoCategory::kAge)) {
      key = key * static_cast<int>(s.age_groups.size()) + c.age;
    }
    if (m.Has(DemoCategory::kEthnicity)) {
      key = key * static_cast<int>(s.ethnicities.size()) + c.ethnicity;
    }
    return key;
  }

  // Preferred tails of `kind` for (disease, key); memoized.
  const std::vector<int>& Preferred(int disease, int key, int kind,
                                    int n_tails) {
    const uint64_t id = (static_cast<uint64_t>(disease) << 32) |
                        (static_cast<uint64_t>(key) << 2) |
                        static_cast<uint64_t>(kind);
    auto it = cache_.find(id);
    if (it != cache_.end()) return it->second;
    // Pool of the key: tails j with j % n_keys == key; keys outnumbering
    // tails share single-tail pools.
    std::vector<int> pool;
    const int n_keys = static_cast<int>(n_keys_);
    if (n_tails >= n_keys) {
      for (int j = key; j < n_tails; j += n_keys) pool.push_back(j);
    } else {
      pool.push_back(key % n_tails);
    }
    Rng rng(SplitMix64(seed_ ^ SplitMix64(id)));
    std::vector<int> picks = SampleDistinct(rng, static_cast<int>(pool.size()),
                                            params_.preferred_per_key);
    std::vector<int> chosen;
    for (int i : picks) chosen.push_back(pool[i]);
    return cache_.emplace(id, std::move(chosen)).first->second;
  }

 private:
  const SyntheticParams& params_;
  uint64_t seed_;
  std::size_t n_keys_ = 1;
  std::map<uint64_t, std::vector<int>> cache_;
};

int WeightedIndex(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = UniformUnit(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return static_cast<int>(i);
    u -= weights[i];
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

std::vector<AdmissionRecord> GenerateSyntheticCorpus(
    const SyntheticParams& params, uint64_t seed) {
  params.Validate();
  const DemoScheme& scheme = params.scheme;
  Rng rng = MakeRng(seed, "synthetic-corpus");
  PlantedPreferences prefs(params, seed);

  // Ages are drawn so every age group is reachable: up to 10 years past the
  // start of the last (open) group.
  const int max_age = scheme.age_groups.back().min_years + 10;
  const int wd = Width(params.n_diseases);
  const int wp = Width(params.n_treatments);
  const int wm = Width(params.n_medicines);
  const int wpat = Width(params.n_patients);

  std::vector<AdmissionRecord> out;
  int admission_counter = 0;
  for (int pat = 0; pat < params.n_patients; ++pat) {
    const int gender =
        static_cast<int>(UniformIndex(rng, scheme.genders.size()));
    const int base_age = UniformInt(rng, 0, max_age);
    const int ethnicity =
        params.ethnicity_weights.empty()
            ? static_cast<int>(UniformIndex(rng, scheme.ethnicities.size()))
            : WeightedIndex(rng, params.ethnicity_weights);
    const int n_adm = UniformInt(rng, params.min_admissions_per_patient,
                                 params.max_admissions_per_patient);
    for (int a = 0; a < n_adm; ++a) {
      AdmissionRecord rec;
      rec.admission_id = "A" + std::to_string(++admission_counter);
      rec.patient_id = Code('S', pat, wpat);
      rec.gender = scheme.genders[gender];
      rec.age_years = base_age + a;
      rec.ethnicity = scheme.ethnicities[ethnicity];

      DemographicSet demo;
      demo.gender = gender;
      demo.age = scheme.AgeGroupForYears(rec.age_years);
      demo.ethnicity = ethnicity;
      const int key = prefs.Key(demo);

      const std::vector<int> diseases = SampleDistinct(
          rng, params.n_diseases,
          UniformInt(rng, params.min_diagnoses, params.max_diagnoses));
      for (int d : diseases) rec.diagnoses.push_back(Code('D', d, wd));

      auto draw_tails = [&](int kind, int n_tails, int lo, int hi, char prefix,
                            int width, std::vector<std::string>& dst) {
        const int count = UniformInt(rng, lo, hi);
        std::set<int> picked;
        for (int i = 0; i < count; ++i) {
          const int d = diseases[UniformIndex(rng, diseases.size())];
          int tail;
          if (UniformUnit(rng) < params.signal) {
            const auto& pref = prefs.Preferred(d, key, kind, n_tails);
            tail = pref[UniformIndex(rng, pref.size())];
          } else {
            tail = static_cast<int>(UniformIndex(rng, n_tails));
          }
          picked.insert(tail);
        }
        for (int t : picked) dst.push_back(Code(prefix, t, width));
      };
      draw_tails(0, params.n_treatments, params.min_procedures,
                 params.max_procedures, 'P', wp, rec.procedures);
      draw_tails(1, params.n_medicines, params.min_medicines,
                 params.max_medicines, 'M', wm, rec.medicines);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view kCsvHeader =
    "admission_id,patient_id,gender,age,ethnicity,diagnoses,procedures,"
    "medicines";

std::vector<std::string> SplitCsvLine(std::string_view line,
                                      std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::kParseError,
                "line " + std::to_string(line_no) + ": unterminated quote");
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::vector<std::string> SplitList(std::string_view cell) {
  std::vector<std::string> out;
  if (Trim(cell).empty()) return out;
  for (const auto& part : SplitString(cell, ';')) {
    const std::string_view p = Trim(part);
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

std::string CsvCell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string JoinList(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    out += items[i];
  }
  return out;
}

}  // namespace

std::vector<AdmissionRecord> ParseAdmissionsCsv(std::string_view text) {
  std::vector<AdmissionRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const std::string& raw_line : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = raw_line;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;
    if (!header_seen) {
      if (Trim(line) != kCsvHeader) {
        throw Error(ErrorCode::kParseError, "admissions CSV header must be '" +
                                                std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = SplitCsvLine(line, line_no);
    if (cells.size() != 8) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": expected 8 cells");
    }
    AdmissionRecord rec;
    rec.admission_id = std::string(Trim(cells[0]));
    rec.patient_id = std::string(Trim(cells[1]));
    rec.gender = std::string(Trim(cells[2]));
    try {
      std::size_t used = 0;
      const std::string age(Trim(cells[3]));
      rec.age_years = std::stoi(age, &used);
      if (used != age.size() || rec.age_years < 0) throw std::exception();
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) +
                                              ": bad age '" + cells[3] + "'");
    }
    rec.ethnicity = std::string(Trim(cells[4]));
    rec.diagnoses = SplitList(cells[5]);
    rec.procedures = SplitList(cells[6]);
    rec.medicines = SplitList(cells[7]);
    if (rec.admission_id.empty()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": empty admission_id");
    }
    out.push_back(std::move(rec));
  }
  if (!header_seen) {
    throw Error(ErrorCode::kParseError, "admissions CSV is empty");
  }
  return out;
}

std::string FormatAdmissionsCsv(std::span<const AdmissionRecord> records) {
  std::string out(kCsvHeader);
  out += "\n";
  for (const auto& r : records) {
    out += CsvCell(r.admission_id) + "," + CsvCell(r.patient_id) + "," +
           CsvCell(r.gender) + "," + std::to_string(r.age_years) + "," +
           CsvCell(r.ethnicity) + "," + CsvCell(JoinList(r.diagnoses)) + "," +
           CsvCell(JoinList(r.procedures)) + "," +
           CsvCell(JoinList(r.medicines)) + "\n";
  }
  return out;
}

}  // namespace darling
