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

#ifndef DARLING_INGEST_H_
#define DARLING_INGEST_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "darling/kg.h"

namespace darling {

struct AdmissionRecord {
  std::string admission_id;
  std::string patient_id;
  std::string gender;
  int age_years = 0;
  std::string ethnicity;
  std::vector<std::string> diagnoses;
  std::vector<std::string> procedures;
  std::vector<std::string> medicines;

  friend bool operator==(const AdmissionRecord&,
                         const AdmissionRecord&) = default;
};

// Gender and ethnicity are matched case-insensitively. Unknown ethnicities
// fall back to scheme.ethnicity_fallback; unknown genders throw
// kUnknownGender.
DemographicSet BucketDemographics(std::string_view gender, int age_years,
                                  std::string_view ethnicity,
                                  const DemoScheme& scheme);

// Admission-level co-occurrence counts.
class CountingTally {
 public:
  // (head, relation, tail, demo label)
  using QuadKey =
      std::tuple<std::string, std::string, std::string, std::string>;

  void AddAdmission(const AdmissionRecord& record, const DemoScheme& scheme);
  // Counts are integers, so merging shards in any order is exact.
  void Merge(const CountingTally& other);

  const std::map<QuadKey, int64_t>& quad_counts() const { return quad_counts_; }
  const std::map<std::string, int64_t>& head_counts() const {
    return head_counts_;
  }
  const std::map<std::string, EntityKind>& kinds() const { return kinds_; }

  friend bool operator==(const CountingTally&, const CountingTally&) = default;

 private:
  void NoteKind(const std::string& code, EntityKind kind);

  std::map<QuadKey, int64_t> quad_counts_;
  std::map<std::string, int64_t> head_counts_;
  std::map<std::string, EntityKind> kinds_;
};

struct ExtractedGraph {
  // Sorted by (head, relation, tail, demo label); independent of the order
  // of the input records.
  std::vector<RawQuad> quads;
  // Every code seen, sorted by code.
  std::vector<EntityRecord> entities;
  CountingTally tally;
};

// Cross product diagnoses x procedures (Disease_to_Treatment) and
// diagnoses x medicines (Disease_to_Medicine) per admission, each distinct
// quad counted once per admission. p = N(h,r,t,c) / N(h). `threads` > 1
// counts shards concurrently and merges.
ExtractedGraph ExtractQuadruples(std::span<const AdmissionRecord> records,
                                 const DemoScheme& scheme, int threads = 1);

struct SyntheticParams {
  int n_patients = 400;
  int n_diseases = 20;
  int n_treatments = 30;
  int n_medicines = 30;
  DemoScheme scheme = DemoScheme::Default();
  int min_admissions_per_patient = 1;
  int max_admissions_per_patient = 3;
  int min_diagnoses = 1;
  int max_diagnoses = 2;
  int min_procedures = 1;
  int max_procedures = 2;
  int min_medicines = 1;
  int max_medicines = 3;
  // Probability that a tail is drawn from the (disease, demographic key)
  // preferred set rather than uniformly.
  double signal = 0.9;
  // Categories that make up the demographic key the preferences depend on.
  DemoMask signal_categories{7};
  // Size of each preferred set.
  int preferred_per_key = 2;
  // Sampling weights for ethnicities; empty means uniform.
  std::vector<double> ethnicity_weights;

  void Validate() const;
};

// Patients get a gender, birth age and ethnicity; each admission draws
// diagnoses uniformly and, per diagnosis, tails that follow the planted
// demographic preference with probability `signal`. Tails of each kind are
// partitioned into pools, one per demographic key, and a (disease, key)
// prefers `preferred_per_key` tails from its key's pool.
std::vector<AdmissionRecord> GenerateSyntheticCorpus(
    const SyntheticParams& params, uint64_t seed);

// CSV with header
// admission_id,patient_id,gender,age,ethnicity,diagnoses,procedures,medicines
// and ';'-separated list cells. Double-quoted cells are supported.
std::vector<AdmissionRecord> ParseAdmissionsCsv(std::string_view text);
std::string FormatAdmissionsCsv(std::span<const AdmissionRecord> records);

}  // namespace darling

#endif  // DARLING_INGEST_H_
