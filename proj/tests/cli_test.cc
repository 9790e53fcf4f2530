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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "testing.h"

namespace darling {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult RunCli(const std::string& dir, const std::string& args) {
  const std::string out = dir + "/.stdout";
  const std::string err = dir + "/.stderr";
  const std::string cmd = std::string(DARLING_CLI) + " --output-dir " + dir +
                          " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = Slurp(out);
  r.err = Slurp(err);
  return r;
}

constexpr const char* kSmall = "--patients 120 --dim 8 --epochs 3";

void RunPipeline(const std::string& dir) {
  for (const char* step : {"synth", "ingest", "split", "train", "eval"}) {
    const RunResult r = RunCli(dir, std::string(step) + " " + kSmall);
    ASSERT_EQ(r.code, 0) << step << ": " << r.err;
  }
}

TEST(Cli, PipelineProducesArtifacts) {
  const std::string dir = testing::TempDir("cli_pipeline");
  RunPipeline(dir);
  for (const char* f : {"admissions.csv", "quads.tsv", "entities.tsv",
                        "train.tsv", "valid.tsv", "test.tsv", "model.ckpt",
                        "train_log.jsonl", "report.json", "report.txt"}) {
    EXPECT_TRUE(fs::exists(dir + "/" + f)) << f;
  }
  const auto report = nlohmann::json::parse(Slurp(dir + "/report.json"));
  EXPECT_GT(report["n_test_quads"].get<int>(), 0);
  EXPECT_EQ(report["tasks"].size(), 2u);

  const RunResult rec = RunCli(
      dir,
      "recommend --gender female --age 65 --ethnicity white --disease D01 "
      "--k 4");
  ASSERT_EQ(rec.code, 0) << rec.err;
  const auto j = nlohmann::json::parse(rec.out);
  EXPECT_EQ(j["recommendations"].size(), 8u);
  EXPECT_EQ(j["demographics"]["age_group"], "[60-70)");
  EXPECT_EQ(Slurp(dir + "/recommendation.json"), rec.out);

  std::size_t lines = 0;
  std::ifstream log(dir + "/train_log.jsonl");
  for (std::string line; std::getline(log, line); ++lines) {
    EXPECT_TRUE(nlohmann::json::accept(line));
  }
  EXPECT_EQ(lines, 4u);
  fs::remove_all(dir);
}

TEST(Cli, ParseErrorsExitTwo) {
  const std::string dir = testing::TempDir("cli_parse");
  EXPECT_EQ(RunCli(dir, "--bogus synth").code, 2);
  EXPECT_EQ(RunCli(dir, "").code, 2);
  EXPECT_EQ(RunCli(dir, "--epochs notanumber train").code, 2);
  const RunResult r = RunCli(dir, "recommend --gender male --age 40");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--disease"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, DomainErrorsExitOne) {
  const std::string dir = testing::TempDir("cli_domain");
  RunPipeline(dir);
  RunResult r = RunCli(dir, "train --eps-pos 1e-20");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("InvalidConfig"), std::string::npos);
  r = RunCli(
      dir, "recommend --gender robot --age 40 --ethnicity white --disease D01");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnknownGender"), std::string::npos);
  r = RunCli(
      dir, "recommend --gender male --age 40 --ethnicity white --disease X99");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnknownDisease"), std::string::npos);
  r = RunCli(dir, "eval --checkpoint " + dir + "/missing.ckpt");
  EXPECT_EQ(r.code, 1);
  fs::remove_all(dir);
}

TEST(Cli, EchoedConfigReproducesRun) {
  const std::string a = testing::TempDir("cli_config_a");
  const std::string b = testing::TempDir("cli_config_b");
  RunPipeline(a);
  for (const char* f : {"entities.tsv", "train.tsv", "valid.tsv", "test.tsv"}) {
    fs::copy_file(a + "/" + f, b + "/" + f);
  }
  const RunResult r = RunCli(b, "--config " + a + "/train.config train");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(a + "/model.ckpt"), Slurp(b + "/model.ckpt"));
  // Only the output directory differs between the two echoes.
  auto without_dir = [](std::string text) {
    return text.substr(text.find('\n'));
  };
  EXPECT_EQ(without_dir(Slurp(a + "/train.config")),
            without_dir(Slurp(b + "/train.config")));
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace
}  // namespace darling
