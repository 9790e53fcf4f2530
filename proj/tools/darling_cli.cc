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

// darling: command-line entry point for data generation, ingestion,
// training, evaluation, experiments and recommendation.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "darling/checkpoint.h"
#include "darling/error.h"
#include "darling/eval.h"
#include "darling/infer.h"
#include "darling/ingest.h"
#include "darling/io.h"
#include "darling/kg.h"
#include "darling/model.h"
#include "darling/train.h"
#include "json.hpp"

namespace {

using namespace darling;
using nlohmann::json;

constexpr int kUsageExit = 2;
constexpr int kDomainExit = 1;

struct Options {
  std::string output_dir;
  int threads = 1;
  uint64_t seed = 1;

  // Data paths; empty means the default file in the output directory.
  std::string admissions;
  std::string quads;
  std::string entities;
  std::string train;
  std::string valid;
  std::string test;
  std::string checkpoint;

  // synth
  int patients = 400;
  int diseases = 20;
  int treatments = 30;
  int medicines = 30;
  double signal = 0.9;
  std::string signal_categories = "all";
  int preferred_per_key = 2;

  // split
  double train_ratio = 0.8;
  double valid_ratio = 0.08;
  double test_ratio = 0.12;

  // model
  std::string family = "DARLING";
  int dim = 128;
  int norm = 2;
  double margin = 1.0;
  double lambda = 1e-2;
  double eps_pos = 1e-4;
  double eps_neg = 1e-15;
  std::string mask = "all";
  bool entity_norm = false;

  // training
  int batch_size = 128;
  double lr = 1e-3;
  int epochs = 100;
  bool probability_score = true;
  int eval_interval = 1;

  // evaluation and experiments
  std::string rank_mode = "raw";
  bool mrr = false;
  // Comma-separated lists.
  std::string ks = "3,10";
  std::string seeds = "1,2,3";
  std::string masks;
  std::string families;
  std::string batch_sizes = "128,256,512";
  std::string lrs = "0.01,0.001,0.0001";

  // recommend
  std::string gender;
  int age = -1;
  std::string ethnicity;
  std::string disease;
  int k = 10;
  std::string kind = "both";
  bool nearest_fallback = false;
  bool novel = false;
};

std::string OutDir(const Options& o) {
  if (!o.output_dir.empty()) return o.output_dir;
  if (const char* env = std::getenv("DARLING_OUTPUT_DIR"); env && *env) {
    return env;
  }
  return "darling_out";
}

std::string PathOr(const std::string& path, const Options& o,
                   const std::string& file) {
  return path.empty() ? (std::filesystem::path(OutDir(o)) / file).string()
                      : path;
}

std::string OutPath(const Options& o, const std::string& file) {
  return (std::filesystem::path(OutDir(o)) / file).string();
}

template <class T>
std::vector<T> ParseList(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const std::string& item : SplitString(text, ',')) {
    const std::string_view v = Trim(item);
    if (v.empty()) continue;
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        out.emplace_back(v);
      } else if constexpr (std::is_floating_point_v<T>) {
        out.push_back(static_cast<T>(std::stod(std::string(v))));
      } else {
        out.push_back(static_cast<T>(std::stoll(std::string(v))));
      }
    } catch (const std::logic_error&) {
      throw Error(
          ErrorCode::kInvalidConfig,
          std::string("bad ") + what + " entry '" + std::string(v) + "'");
    }
  }
  return out;
}

void Log(const json& event) { std::cerr << event.dump() << "\n"; }

ModelConfig BuildModelConfig(const Options& o) {
  ModelConfig c;
  c.family = ParseFamily(o.family);
  c.dim = o.dim;
  c.norm = o.norm;
  c.margin = o.margin;
  c.lambda = o.lambda;
  c.eps_pos = o.eps_pos;
  c.eps_neg = o.eps_neg;
  c.demo_mask = DemoMask::Parse(o.mask);
  c.entity_norm_constraint = o.entity_norm;
  c.Validate();
  return c;
}

TrainConfig BuildTrainConfig(const Options& o) {
  TrainConfig t;
  t.batch_size = o.batch_size;
  t.learning_rate = o.lr;
  t.epochs = o.epochs;
  t.seed = o.seed;
  t.use_probability_score = o.probability_score;
  t.eval_interval = o.eval_interval;
  t.threads = o.threads;
  t.Validate();
  return t;
}

ExperimentSpec BuildSpec(const Options& o) {
  ExperimentSpec spec;
  spec.ratios = {o.train_ratio, o.valid_ratio, o.test_ratio};
  spec.seeds = ParseList<uint64_t>(o.seeds, "seed");
  spec.ks = ParseList<int>(o.ks, "k");
  spec.mode = ParseRankMode(o.rank_mode);
  if (spec.seeds.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one seed is required");
  }
  return spec;
}

InternedGraph LoadGraph(const Options& o) {
  const auto entities =
      ParseEntitiesTsv(ReadFile(PathOr(o.entities, o, "entities.tsv")));
  const auto raw = ParseQuadTsv(ReadFile(PathOr(o.quads, o, "quads.tsv")));
  return InternGraph(raw, DemoScheme::Default(), entities);
}

// Train/valid/test files interned into one vocabulary, then masked.
MaskedSplit LoadSplit(const Options& o, DemoMask mask) {
  const auto entities =
      ParseEntitiesTsv(ReadFile(PathOr(o.entities, o, "entities.tsv")));
  Vocabulary vocab(DemoScheme::Default());
  DatasetSplit split;
  split.train = InternInto(
      vocab, ParseQuadTsv(ReadFile(PathOr(o.train, o, "train.tsv"))), entities);
  split.valid = InternInto(
      vocab, ParseQuadTsv(ReadFile(PathOr(o.valid, o, "valid.tsv"))), entities);
  split.test = InternInto(
      vocab, ParseQuadTsv(ReadFile(PathOr(o.test, o, "test.tsv"))), entities);
  return MaskSplit(vocab, split, mask);
}

json EpochJson(const EpochLog& l) {
  return {{"event", "epoch"},
          {"epoch", l.epoch},
          {"mean_hinge", l.mean_hinge},
          {"active_terms", l.active_terms},
          {"valid_mean_rank", l.valid_mean_rank},
          {"best_valid_mean_rank", l.best_valid_mean_rank},
          {"wall_seconds", l.wall_seconds}};
}

void RunSynth(const Options& o) {
  SyntheticParams p;
  p.n_patients = o.patients;
  p.n_diseases = o.diseases;
  p.n_treatments = o.treatments;
  p.n_medicines = o.medicines;
  p.signal = o.signal;
  p.signal_categories = DemoMask::Parse(o.signal_categories);
  p.preferred_per_key = o.preferred_per_key;
  p.Validate();
  const auto records = GenerateSyntheticCorpus(p, o.seed);
  const std::string path = PathOr(o.admissions, o, "admissions.csv");
  WriteFileAtomic(path, FormatAdmissionsCsv(records));
  Log({{"event", "synth"}, {"admissions", records.size()}, {"path", path}});
}

void RunIngest(const Options& o) {
  const auto records =
      ParseAdmissionsCsv(ReadFile(PathOr(o.admissions, o, "admissions.csv")));
  const ExtractedGraph g =
      ExtractQuadruples(records, DemoScheme::Default(), o.threads);
  WriteFileAtomic(PathOr(o.quads, o, "quads.tsv"), FormatQuadTsv(g.quads));
  WriteFileAtomic(PathOr(o.entities, o, "entities.tsv"),
                  FormatEntitiesTsv(g.entities));
  Log({{"event", "ingest"},
       {"admissions", records.size()},
       {"quadruples", g.quads.size()},
       {"entities", g.entities.size()}});
}

void RunSplit(const Options& o) {
  const InternedGraph g = LoadGraph(o);
  const SplitRatios ratios{o.train_ratio, o.valid_ratio, o.test_ratio};
  const DatasetSplit split =
      SplitDataset(g.store, ratios, DeriveSeed(o.seed, "split"));
  WriteFileAtomic(PathOr(o.train, o, "train.tsv"),
                  FormatQuadTsv(g.vocab, split.train));
  WriteFileAtomic(PathOr(o.valid, o, "valid.tsv"),
                  FormatQuadTsv(g.vocab, split.valid));
  WriteFileAtomic(PathOr(o.test, o, "test.tsv"),
                  FormatQuadTsv(g.vocab, split.test));
  Log({{"event", "split"},
       {"train", split.train.size()},
       {"valid", split.valid.size()},
       {"test", split.test.size()}});
}

void RunTrain(const Options& o) {
  const ModelConfig mc = BuildModelConfig(o);
  const TrainConfig tc = BuildTrainConfig(o);
  const MaskedSplit data = LoadSplit(o, mc.demo_mask);
  std::string log_lines;
  const FitResult fit =
      Fit(mc, tc, data.vocab, data.split, [&](const EpochLog& l) {
        const json j = EpochJson(l);
        Log(j);
        log_lines += j.dump() + "\n";
      });
  const std::string path = PathOr(o.checkpoint, o, "model.ckpt");
  SaveCheckpoint(path, Checkpoint{mc, data.vocab, fit.best});
  WriteFileAtomic(OutPath(o, "train_log.jsonl"), log_lines);
  Log({{"event", "train_done"},
       {"best_epoch", fit.best_epoch},
       {"best_valid_mean_rank", fit.best_valid_mean_rank},
       {"initial_valid_mean_rank", fit.initial_valid_mean_rank},
       {"checkpoint", path}});
}

void RunEval(const Options& o) {
  const Checkpoint ck = LoadCheckpoint(PathOr(o.checkpoint, o, "model.ckpt"));
  const MaskedSplit data = LoadSplit(o, ck.config.demo_mask);
  if (data.vocab.Hash() != ck.vocab.Hash()) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "data files do not match the checkpoint vocabulary");
  }
  const RankingReport report = Evaluate(
      ck.config, ck.store, ck.vocab, data.split.test, KnownTriples(data.split),
      ParseList<int>(o.ks, "k"), ParseRankMode(o.rank_mode), o.threads);
  WriteFileAtomic(OutPath(o, "report.json"), FormatReportJson(report, o.mrr));
  WriteFileAtomic(OutPath(o, "report.txt"), FormatReportText(report));
  std::cout << FormatReportText(report);
}

std::vector<DemoMask> SweepMasks(const Options& o) {
  const auto names = ParseList<std::string>(o.masks, "mask");
  if (names.empty()) return DemoMask::AllNonEmpty();
  std::vector<DemoMask> out;
  for (const auto& m : names) out.push_back(DemoMask::Parse(m));
  return out;
}

void RunSweep(const Options& o) {
  const ModelConfig mc = BuildModelConfig(o);
  const TrainConfig tc = BuildTrainConfig(o);
  const ExperimentSpec spec = BuildSpec(o);
  const auto masks = SweepMasks(o);
  const InternedGraph g = LoadGraph(o);
  const SweepGrid grid = SensitivitySweep(
      mc, tc, g.vocab, g.store, spec, masks, [](const std::string& m) {
        Log({{"event", "progress"}, {"message", m}});
      });
  WriteFileAtomic(OutPath(o, "sweep.txt"), FormatSweepText(grid));
  WriteFileAtomic(OutPath(o, "sweep.json"), FormatSweepJson(grid));
  WriteFileAtomic(OutPath(o, "sweep.csv"), FormatSweepCsv(grid));
  std::cout << FormatSweepText(grid);
}

void RunCompare(const Options& o) {
  const ModelConfig mc = BuildModelConfig(o);
  const TrainConfig tc = BuildTrainConfig(o);
  const ExperimentSpec spec = BuildSpec(o);
  std::vector<ModelFamily> families;
  for (const auto& f : ParseList<std::string>(o.families, "family")) {
    families.push_back(ParseFamily(f));
  }
  if (families.empty()) families = AllFamilies();
  Budget budget{ParseList<int>(o.batch_sizes, "batch size"),
                ParseList<double>(o.lrs, "learning rate")};
  const InternedGraph g = LoadGraph(o);
  const ComparisonTable table =
      CompareBaselines(mc, tc, g.vocab, g.store, spec, families, budget,
                       [](const std::string& m) {
                         Log({{"event", "progress"}, {"message", m}});
                       });
  WriteFileAtomic(OutPath(o, "compare.txt"), FormatComparisonText(table));
  WriteFileAtomic(OutPath(o, "compare.json"), FormatComparisonJson(table));
  std::cout << FormatComparisonText(table);
}

void RunRecommend(const Options& o) {
  const Checkpoint ck = LoadCheckpoint(PathOr(o.checkpoint, o, "model.ckpt"));
  Query q;
  q.gender = o.gender;
  q.age_years = o.age;
  q.ethnicity = o.ethnicity;
  q.disease = o.disease;
  q.k = o.k;
  q.kind = ParseTargetKind(o.kind);
  TripleSet known;
  RecommendOptions opts;
  opts.nearest_demo_fallback = o.nearest_fallback;
  if (o.novel) {
    for (const RawQuad& rq :
         ParseQuadTsv(ReadFile(PathOr(o.train, o, "train.tsv")))) {
      const auto h = ck.vocab.FindEntity(rq.head);
      const auto r = ck.vocab.FindRelation(rq.relation);
      const auto t = ck.vocab.FindEntity(rq.tail);
      if (h && r && t) known.insert(Triple{*h, *r, *t});
    }
    opts.exclude_known = &known;
  }
  const std::string out = FormatRecommendationJson(Recommend(ck, q, opts));
  WriteFileAtomic(OutPath(o, "recommendation.json"), out);
  std::cout << out;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"darling: demographic-aware knowledge graph embeddings"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option(
      "--output-dir", o.output_dir,
      "Output directory (default $DARLING_OUTPUT_DIR or darling_out)");
  app.add_option("--threads", o.threads, "Worker threads (1 = sequential)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Root seed");

  app.add_option("--admissions", o.admissions, "Admissions CSV");
  app.add_option("--quads", o.quads, "Quadruple TSV");
  app.add_option("--entities", o.entities, "Entity table TSV");
  app.add_option("--train", o.train, "Train quadruple TSV");
  app.add_option("--valid", o.valid, "Validation quadruple TSV");
  app.add_option("--test", o.test, "Test quadruple TSV");
  app.add_option("--checkpoint", o.checkpoint, "Model checkpoint");

  app.add_option("--patients", o.patients, "Synthetic patients");
  app.add_option("--diseases", o.diseases, "Synthetic diseases");
  app.add_option("--treatments", o.treatments, "Synthetic treatments");
  app.add_option("--medicines", o.medicines, "Synthetic medicines");
  app.add_option("--signal", o.signal, "Planted signal strength in [0, 1]");
  app.add_option("--signal-categories", o.signal_categories,
                 "Demographic categories carrying the planted signal");
  app.add_option("--preferred-per-key", o.preferred_per_key,
                 "Preferred tails per (disease, demographic key)");

  app.add_option("--train-ratio", o.train_ratio, "Train fraction");
  app.add_option("--valid-ratio", o.valid_ratio, "Validation fraction");
  app.add_option("--test-ratio", o.test_ratio, "Test fraction");

  app.add_option("--family", o.family, "Model family");
  app.add_option("--dim", o.dim, "Embedding dimension");
  app.add_option("--norm", o.norm, "Distance norm order (1 or 2)");
  app.add_option("--margin", o.margin, "Hinge margin");
  app.add_option("--lambda", o.lambda, "Probability-score weight");
  app.add_option("--eps-pos", o.eps_pos, "Positive probability floor");
  app.add_option("--eps-neg", o.eps_neg, "Negative probability target");
  app.add_option("--mask", o.mask, "Demographic mask (e.g. all, Age, G+E)");
  app.add_option("--entity-norm", o.entity_norm,
                 "Constrain entity embeddings to the unit ball (true/false)");

  app.add_option("--batch-size", o.batch_size, "Mini-batch size");
  app.add_option("--lr", o.lr, "Adam learning rate");
  app.add_option("--epochs", o.epochs, "Training epochs");
  app.add_option("--probability-score", o.probability_score,
                 "Use the probability score (true/false)");
  app.add_option("--eval-interval", o.eval_interval,
                 "Epochs between validation passes");

  app.add_option("--rank-mode", o.rank_mode, "raw or filtered");
  app.add_flag("--mrr", o.mrr, "Include MRR in the JSON report");
  app.add_option("--ks", o.ks, "Hits@K cut-offs");
  app.add_option("--seeds", o.seeds, "Experiment seeds");
  app.add_option("--masks", o.masks, "Sweep masks (default all seven)");
  app.add_option("--families", o.families, "Compared families (default all)");
  app.add_option("--batch-sizes", o.batch_sizes, "Batch-size grid");
  app.add_option("--lrs", o.lrs, "Learning-rate grid");

  app.add_option("--gender", o.gender, "Query gender");
  app.add_option("--age", o.age, "Query age in years");
  app.add_option("--ethnicity", o.ethnicity, "Query ethnicity");
  app.add_option("--disease", o.disease, "Query disease code");
  app.add_option("--k", o.k, "Recommendations per kind");
  app.add_option("--kind", o.kind, "treatment, medicine or both");
  app.add_flag("--nearest-fallback", o.nearest_fallback,
               "Use the closest seen demographic set for unseen ones");
  app.add_flag("--novel", o.novel,
               "Exclude tails already linked to the disease in training");

  struct Command {
    CLI::App* app;
    void (*run)(const Options&);
  };
  const std::vector<Command> commands = {
      {app.add_subcommand("synth", "Generate a synthetic admissions corpus"),
       RunSynth},
      {app.add_subcommand("ingest", "Extract quadruples from admissions"),
       RunIngest},
      {app.add_subcommand("split", "Split quadruples into train/valid/test"),
       RunSplit},
      {app.add_subcommand("train", "Train a model and save a checkpoint"),
       RunTrain},
      {app.add_subcommand("eval", "Evaluate a checkpoint on the test split"),
       RunEval},
      {app.add_subcommand("sweep", "Demographic-mask x probability-score grid"),
       RunSweep},
      {app.add_subcommand("compare", "Compare model families"), RunCompare},
      {app.add_subcommand("recommend", "Top-k recommendations for a patient"),
       RunRecommend},
  };
  app.get_subcommand("recommend")->callback([&] {
    if (o.disease.empty() || o.gender.empty() || o.ethnicity.empty() ||
        o.age < 0) {
      throw CLI::ValidationError(
          "recommend needs --gender, --age, --ethnicity and --disease");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      WriteFileAtomic(OutPath(o, c.app->get_name() + ".config"),
                      app.config_to_str(true, false));
      const auto start = std::chrono::steady_clock::now();
      c.run(o);
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      Log({{"event", "done"},
           {"command", c.app->get_name()},
           {"wall_seconds", secs}});
    } catch (const Error& e) {
      Log({{"event", "error"},
           {"command", c.app->get_name()},
           {"error", ErrorCodeName(e.code())},
           {"message", e.what()}});
      std::cerr << "error: " << e.what() << "\n";
      return kDomainExit;
    } catch (const std::exception& e) {
      Log({{"event", "error"},
           {"command", c.app->get_name()},
           {"error", "Internal"},
           {"message", e.what()}});
      std::cerr << "error: " << e.what() << "\n";
      return kDomainExit;
    }
  }
  return 0;
}
