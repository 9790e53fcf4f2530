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

#include "darling/eval.h"

#include <algorithm>
#include <cstdio>
#include <set>

#include "darling/error.h"
#include "darling/io.h"
#include "json.hpp"

namespace darling {

using nlohmann::json;

std::string_view RankModeName(RankMode mode) {
  return mode == RankMode::kRaw ? "raw" : "filtered";
}

RankMode ParseRankMode(std::string_view name) {
  const std::string n = ToLower(Trim(name));
  if (n == "raw") return RankMode::kRaw;
  if (n == "filtered" || n == "filter") return RankMode::kFiltered;
  throw Error(ErrorCode::kInvalidConfig,
              "rank mode must be raw or filtered, got '" + n + "'");
}

TripleSet KnownTriples(const QuadrupleStore& store) {
  TripleSet known;
  for (const Quadruple& q : store.quads()) known.insert(q.triple());
  return known;
}

TripleSet KnownTriples(const DatasetSplit& split) {
  TripleSet known;
  for (const QuadrupleStore* s : {&split.train, &split.valid, &split.test}) {
    for (const Quadruple& q : s->quads()) known.insert(q.triple());
  }
  return known;
}

std::vector<std::vector<EntityId>> CandidateSets(const Vocabulary& vocab) {
  std::vector<std::vector<EntityId>> out;
  for (const RelationRecord& r : vocab.relations()) {
    out.push_back(vocab.EntitiesOfKind(r.tail_kind));
  }
  return out;
}

uint64_t RankTail(const ModelConfig& config, const EmbeddingStore& store,
                  const Quadruple& quad, std::span<const EntityId> candidates,
                  RankMode mode, const TripleSet* known) {
  if (std::find(candidates.begin(), candidates.end(), quad.tail) ==
      candidates.end()) {
    throw Error(ErrorCode::kTrueTailMissing,
                "true tail " + std::to_string(quad.tail.value) +
                    " is not among the candidates");
  }
  if (mode == RankMode::kFiltered && known == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "filtered ranking needs the known-triple set");
  }
  const std::optional<DemoSetId> demo = quad.demo;
  std::vector<double> scores(candidates.size());
  ScoreTails(config, store, quad.head, quad.relation, demo, candidates, scores);
  double true_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == quad.tail) true_score = scores[i];
  }
  uint64_t better = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const EntityId c = candidates[i];
    if (c == quad.tail) continue;
    if (mode == RankMode::kFiltered &&
        known->contains(Triple{quad.head, quad.relation, c})) {
      continue;
    }
    if (scores[i] < true_score ||
        (scores[i] == true_score && c.value < quad.tail.value)) {
      ++better;
    }
  }
  return better + 1;
}

std::vector<uint64_t> RankAll(const ModelConfig& config,
                              const EmbeddingStore& store,
                              const Vocabulary& vocab,
                              const QuadrupleStore& quads, RankMode mode,
                              const TripleSet* known, int threads) {
  const auto candidates = CandidateSets(vocab);
  std::vector<uint64_t> ranks(quads.size());
  ParallelFor(quads.size(), threads, [&](std::size_t lo, std::size_t hi, int) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Quadruple& q = quads[i];
      ranks[i] = RankTail(config, store, q, candidates.at(q.relation.value),
                          mode, known);
    }
  });
  return ranks;
}

std::string TaskName(std::string_view relation) {
  std::string out(relation);
  const auto pos = out.find("_to_");
  if (pos != std::string::npos) out.replace(pos, 4, "-");
  return out;
}

RankingReport Summarize(const Vocabulary& vocab, const QuadrupleStore& quads,
                        std::span<const uint64_t> ranks,
                        std::span<const int> ks, RankMode mode) {
  RankingReport report;
  report.mode = mode;
  report.n = quads.size();
  std::vector<std::vector<uint64_t>> by_rel(vocab.num_relations());
  double total = 0.0;
  for (std::size_t i = 0; i < quads.size(); ++i) {
    by_rel[quads[i].relation.value].push_back(ranks[i]);
    total += static_cast<double>(ranks[i]);
  }
  report.mean_rank =
      quads.empty() ? 0.0 : total / static_cast<double>(quads.size());
  for (std::size_t r = 0; r < by_rel.size(); ++r) {
    auto& rs = by_rel[r];
    if (rs.empty()) continue;
    std::sort(rs.begin(), rs.end());
    TaskMetrics m;
    m.relation = vocab.relation(RelationId(static_cast<uint32_t>(r))).name;
    m.task = TaskName(m.relation);
    m.n = rs.size();
    double sum = 0.0, rr = 0.0;
    for (uint64_t x : rs) {
      sum += static_cast<double>(x);
      rr += 1.0 / static_cast<double>(x);
    }
    m.mean_rank = sum / static_cast<double>(rs.size());
    m.mrr = rr / static_cast<double>(rs.size());
    for (int k : ks) {
      const auto hit = std::count_if(rs.begin(), rs.end(), [k](uint64_t x) {
        return x <= static_cast<uint64_t>(k);
      });
      m.hits[k] = static_cast<double>(hit) / static_cast<double>(rs.size());
    }
    report.tasks.push_back(std::move(m));
  }
  return report;
}

RankingReport Evaluate(const ModelConfig& config, const EmbeddingStore& store,
                       const Vocabulary& vocab, const QuadrupleStore& test,
                       const TripleSet& known, std::span<const int> ks,
                       RankMode mode, int threads) {
  if (test.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty test store");
  }
  const auto ranks = RankAll(config, store, vocab, test, mode, &known, threads);
  return Summarize(vocab, test, ranks, ks, mode);
}

double MeanRank(const ModelConfig& config, const EmbeddingStore& store,
                const Vocabulary& vocab, const QuadrupleStore& quads,
                int threads) {
  const auto ranks =
      RankAll(config, store, vocab, quads, RankMode::kRaw, nullptr, threads);
  double sum = 0.0;
  for (uint64_t r : ranks) sum += static_cast<double>(r);
  return ranks.empty() ? 0.0 : sum / static_cast<double>(ranks.size());
}

namespace {

json ReportJson(const RankingReport& r, bool include_mrr = false) {
  json j;
  j["mode"] = RankModeName(r.mode);
  j["n_test_quads"] = r.n;
  j["mean_rank"] = r.mean_rank;
  j["tasks"] = json::array();
  for (const TaskMetrics& t : r.tasks) {
    json tj;
    tj["task"] = t.task;
    tj["relation"] = t.relation;
    tj["n"] = t.n;
    tj["mean_rank"] = t.mean_rank;
    json hits = json::object();
    for (const auto& [k, v] : t.hits) hits[std::to_string(k)] = v;
    tj["hits"] = hits;
    if (include_mrr) tj["mrr"] = t.mrr;
    j["tasks"].push_back(tj);
  }
  return j;
}

std::string Fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string Percent(double v) { return Fixed(100.0 * v, 2) + "%"; }

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string PadLeft(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Union of task names across reports, in first-seen order.
std::vector<std::string> TaskNames(std::span<const RankingReport> reports) {
  std::vector<std::string> names;
  for (const auto& r : reports) {
    for (const auto& t : r.tasks) {
      if (std::find(names.begin(), names.end(), t.task) == names.end()) {
        names.push_back(t.task);
      }
    }
  }
  return names;
}

const TaskMetrics* FindTask(const RankingReport& r, const std::string& task) {
  for (const auto& t : r.tasks) {
    if (t.task == task) return &t;
  }
  return nullptr;
}

}  // namespace

std::string FormatReportJson(const RankingReport& report, bool include_mrr) {
  return ReportJson(report, include_mrr).dump(2) + "\n";
}

std::string FormatReportText(const RankingReport& report) {
  std::string out = "mode: " + std::string(RankModeName(report.mode)) +
                    "  n: " + std::to_string(report.n) +
                    "  overall MR: " + Fixed(report.mean_rank, 2) + "\n";
  std::string header = Pad("Task", 22) + PadLeft("n", 8) + PadLeft("MR", 10);
  std::set<int> ks;
  for (const auto& t : report.tasks) {
    for (const auto& [k, v] : t.hits) ks.insert(k);
  }
  for (int k : ks) header += PadLeft("Hits@" + std::to_string(k), 10);
  out += header + "\n" + std::string(header.size(), '-') + "\n";
  for (const auto& t : report.tasks) {
    std::string line = Pad(t.task, 22) + PadLeft(std::to_string(t.n), 8) +
                       PadLeft(Fixed(t.mean_rank, 2), 10);
    for (int k : ks) {
      auto it = t.hits.find(k);
      line += PadLeft(it == t.hits.end() ? "-" : Percent(it->second), 10);
    }
    out += line + "\n";
  }
  return out;
}

RankingReport MedianReport(std::span<const RankingReport> reports) {
  RankingReport out;
  if (reports.empty()) return out;
  out.mode = reports.front().mode;
  std::vector<double> overall;
  for (const auto& r : reports) overall.push_back(r.mean_rank);
  out.mean_rank = Median(overall);
  out.n = reports.front().n;
  for (const std::string& name : TaskNames(reports)) {
    TaskMetrics m;
    m.task = name;
    std::vector<double> mr, mrr;
    std::map<int, std::vector<double>> hits;
    std::vector<double> ns;
    for (const auto& r : reports) {
      const TaskMetrics* t = FindTask(r, name);
      if (t == nullptr) continue;
      m.relation = t->relation;
      mr.push_back(t->mean_rank);
      mrr.push_back(t->mrr);
      ns.push_back(static_cast<double>(t->n));
      for (const auto& [k, v] : t->hits) hits[k].push_back(v);
    }
    m.mean_rank = Median(mr);
    m.mrr = Median(mrr);
    m.n = static_cast<std::size_t>(Median(ns));
    for (auto& [k, v] : hits) m.hits[k] = Median(v);
    out.tasks.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sensitivity sweep

SweepGrid SensitivitySweep(
    const ModelConfig& base, const TrainConfig& train, const Vocabulary& vocab,
    const QuadrupleStore& store, const ExperimentSpec& spec,
    std::span<const DemoMask> masks,
    const std::function<void(const std::string&)>& progress) {
  SweepGrid grid;
  grid.seeds = spec.seeds;
  grid.ks = spec.ks;
  std::vector<DatasetSplit> splits;
  for (const uint64_t seed : spec.seeds) {
    splits.push_back(
        SplitDataset(store, spec.ratios, DeriveSeed(seed, "split")));
  }
  for (const DemoMask mask : masks) {
    SweepCell with{mask, true, {}, {}};
    SweepCell without{mask, false, {}, {}};
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      const uint64_t seed = spec.seeds[s];
      const MaskedSplit masked = MaskSplit(vocab, splits[s], mask);
      const TripleSet known = KnownTriples(masked.split);
      for (SweepCell* cell : {&with, &without}) {
        ModelConfig mc = base;
        mc.family = ModelFamily::kDarling;
        mc.demo_mask = mask;
        TrainConfig tc = train;
        tc.seed = seed;
        tc.use_probability_score = cell->with_probability;
        const FitResult fit = Fit(mc, tc, masked.vocab, masked.split);
        cell->per_seed.push_back(Evaluate(mc, fit.best, masked.vocab,
                                          masked.split.test, known, spec.ks,
                                          spec.mode, tc.threads));
        if (progress) {
          progress("sweep mask=" + mask.Label() +
                   " prob=" + (cell->with_probability ? "with" : "without") +
                   " seed=" + std::to_string(seed) +
                   " test MR=" + Fixed(cell->per_seed.back().mean_rank, 3));
        }
      }
    }
    with.median = MedianReport(with.per_seed);
    without.median = MedianReport(without.per_seed);
    grid.cells.push_back(std::move(with));
    grid.cells.push_back(std::move(without));
  }
  return grid;
}

namespace {

struct SweepRow {
  DemoMask mask;
  const SweepCell* with = nullptr;
  const SweepCell* without = nullptr;
};

std::vector<SweepRow> SweepRows(const SweepGrid& grid) {
  std::vector<SweepRow> rows;
  for (const SweepCell& c : grid.cells) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SweepRow& r) { return r.mask == c.mask; });
    if (it == rows.end()) {
      rows.push_back({c.mask, nullptr, nullptr});
      it = rows.end() - 1;
    }
    (c.with_probability ? it->with : it->without) = &c;
  }
  return rows;
}

std::vector<std::string> SweepTasks(const SweepGrid& grid) {
  std::vector<RankingReport> medians;
  for (const auto& c : grid.cells) medians.push_back(c.median);
  return TaskNames(medians);
}

int LargestK(const std::vector<int>& ks) {
  return ks.empty() ? 10 : *std::max_element(ks.begin(), ks.end());
}

std::string MetricOrDash(const SweepCell* cell, const std::string& task, int k,
                         bool hits) {
  if (cell == nullptr) return "-";
  const TaskMetrics* t = FindTask(cell->median, task);
  if (t == nullptr) return "-";
  if (!hits) return Fixed(t->mean_rank, 2);
  auto it = t->hits.find(k);
  return it == t->hits.end() ? "-" : Percent(it->second);
}

}  // namespace

std::string FormatSweepText(const SweepGrid& grid) {
  const auto tasks = SweepTasks(grid);
  const int k = LargestK(grid.ks);
  const std::string hk = "Hits@" + std::to_string(k);
  const std::size_t w0 = 20, w = 10;
  std::string l1 = Pad("Task", w0), l2 = Pad("Methods", w0),
              l3 = Pad("Probability score", w0);
  for (const auto& task : tasks) {
    l1 += "| " + Pad(task, 4 * w);
    l2 += "| " + Pad("Mean Rank", 2 * w) + Pad(hk, 2 * w);
    l3 += "| " + Pad("with", w) + Pad("without", w) + Pad("with", w) +
          Pad("without", w);
  }
  std::string out =
      l1 + "\n" + l2 + "\n" + l3 + "\n" + std::string(l3.size(), '-') + "\n";
  for (const SweepRow& row : SweepRows(grid)) {
    std::string line = Pad("DARLING (" + row.mask.Label() + ")", w0);
    for (const auto& task : tasks) {
      line += "| " + Pad(MetricOrDash(row.with, task, k, false), w) +
              Pad(MetricOrDash(row.without, task, k, false), w) +
              Pad(MetricOrDash(row.with, task, k, true), w) +
              Pad(MetricOrDash(row.without, task, k, true), w);
    }
    out += line + "\n";
  }
  out += "(median over " + std::to_string(grid.seeds.size()) + " seeds)\n";
  return out;
}

std::string FormatSweepJson(const SweepGrid& grid) {
  json j;
  j["seeds"] = grid.seeds;
  j["ks"] = grid.ks;
  j["cells"] = json::array();
  for (const SweepCell& c : grid.cells) {
    json cj;
    cj["mask"] = c.mask.Label();
    cj["probability_score"] = c.with_probability ? "with" : "without";
    cj["median"] = ReportJson(c.median);
    cj["per_seed"] = json::array();
    for (const auto& r : c.per_seed) cj["per_seed"].push_back(ReportJson(r));
    j["cells"].push_back(cj);
  }
  return j.dump(2) + "\n";
}

std::string FormatSweepCsv(const SweepGrid& grid) {
  std::string out = "mask,probability_score,task,metric,value\n";
  for (const SweepCell& c : grid.cells) {
    for (const TaskMetrics& t : c.median.tasks) {
      const std::string prefix = c.mask.Label() + "," +
                                 (c.with_probability ? "with" : "without") +
                                 "," + t.task + ",";
      out += prefix + "mean_rank," + FormatDouble(t.mean_rank) + "\n";
      for (const auto& [k, v] : t.hits) {
        out +=
            prefix + "hits@" + std::to_string(k) + "," + FormatDouble(v) + "\n";
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baseline comparison

ComparisonTable CompareBaselines(
    const ModelConfig& base, const TrainConfig& train, const Vocabulary& vocab,
    const QuadrupleStore& store, const ExperimentSpec& spec,
    std::span<const ModelFamily> families, const Budget& budget,
    const std::function<void(const std::string&)>& progress) {
  if (budget.batch_sizes.empty() || budget.learning_rates.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "empty hyperparameter grid");
  }
  ComparisonTable table;
  table.ks = spec.ks;
  for (ModelFamily f : families) table.rows.push_back({f, {}, {}});

  for (const uint64_t seed : spec.seeds) {
    // All families see the same split, keyed by the base mask.
    const MaskedSplit g = MaskSplit(
        vocab, SplitDataset(store, spec.ratios, DeriveSeed(seed, "split")),
        base.demo_mask);
    const DatasetSplit& split = g.split;
    const TripleSet known = KnownTriples(split);
    for (ComparisonRow& row : table.rows) {
      ModelConfig mc = base;
      mc.family = row.family;
      std::optional<ComparisonRow::Choice> best;
      EmbeddingStore best_store;
      for (int b : budget.batch_sizes) {
        for (double lr : budget.learning_rates) {
          TrainConfig tc = train;
          tc.seed = seed;
          tc.batch_size = b;
          tc.learning_rate = lr;
          FitResult fit = Fit(mc, tc, g.vocab, split);
          if (!best || fit.best_valid_mean_rank < best->valid_mean_rank) {
            best = ComparisonRow::Choice{
                seed, b, lr, fit.best_valid_mean_rank, {}};
            best_store = std::move(fit.best);
          }
        }
      }
      best->test = Evaluate(mc, best_store, g.vocab, split.test, known, spec.ks,
                            spec.mode, train.threads);
      if (progress) {
        progress("compare family=" + std::string(FamilyName(row.family)) +
                 " seed=" + std::to_string(seed) +
                 " test MR=" + Fixed(best->test.mean_rank, 3));
      }
      row.per_seed.push_back(std::move(*best));
    }
  }
  for (ComparisonRow& row : table.rows) {
    std::vector<RankingReport> tests;
    for (const auto& c : row.per_seed) tests.push_back(c.test);
    row.median = MedianReport(tests);
  }
  return table;
}

std::string FormatComparisonText(const ComparisonTable& table) {
  std::vector<RankingReport> medians;
  for (const auto& r : table.rows) medians.push_back(r.median);
  const auto tasks = TaskNames(medians);
  const std::size_t w0 = 12, w = 11;
  std::string l1 = Pad("Task", w0), l2 = Pad("Methods", w0);
  for (const auto& task : tasks) {
    l1 += "| " + Pad(task, w * (1 + table.ks.size()));
    l2 += "| " + Pad("Mean Rank", w);
    for (int k : table.ks) l2 += Pad("Hits@" + std::to_string(k), w);
  }
  std::string out = l1 + "\n" + l2 + "\n" + std::string(l2.size(), '-') + "\n";
  for (const ComparisonRow& row : table.rows) {
    std::string line = Pad(std::string(FamilyName(row.family)), w0);
    for (const auto& task : tasks) {
      const TaskMetrics* t = FindTask(row.median, task);
      line += "| " + Pad(t ? Fixed(t->mean_rank, 2) : "-", w);
      for (int k : table.ks) {
        std::string cell = "-";
        if (t) {
          auto it = t->hits.find(k);
          if (it != t->hits.end()) cell = Percent(it->second);
        }
        line += Pad(cell, w);
      }
    }
    out += line + "\n";
  }
  return out;
}

std::string FormatComparisonJson(const ComparisonTable& table) {
  json j;
  j["ks"] = table.ks;
  j["rows"] = json::array();
  for (const ComparisonRow& row : table.rows) {
    json rj;
    rj["family"] = FamilyName(row.family);
    rj["median"] = ReportJson(row.median);
    rj["per_seed"] = json::array();
    for (const auto& c : row.per_seed) {
      rj["per_seed"].push_back({{"seed", c.seed},
                                {"batch_size", c.batch_size},
                                {"learning_rate", c.learning_rate},
                                {"valid_mean_rank", c.valid_mean_rank},
                                {"test", ReportJson(c.test)}});
    }
    j["rows"].push_back(rj);
  }
  return j.dump(2) + "\n";
}

}  // namespace darling
