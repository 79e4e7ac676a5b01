// Copyright 2026 The MEntA Authors
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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "menta/io.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult Cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + MENTA_CLI_PATH + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path Dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("menta_cli_" + name);
  fs::remove_all(d);
  return d;
}

size_t CountLines(const fs::path& p) {
  std::ifstream in(p);
  size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

TEST(CliTest, SynthWritesCorpusAndIsRepeatable) {
  const auto a = Dir("synth_a");
  const auto b = Dir("synth_b");
  ASSERT_EQ(Cli("synth --members 20 --non-members 20 --seed 1 --out " + a.string()).code, 0);
  ASSERT_EQ(Cli("synth --members 20 --non-members 20 --seed 1 --out " + b.string()).code, 0);
  EXPECT_EQ(CountLines(a / "corpus.jsonl"), 40u);
  EXPECT_TRUE(fs::exists(a / "split.json"));
  EXPECT_EQ(menta::io::ReadFile(a / "corpus.jsonl"), menta::io::ReadFile(b / "corpus.jsonl"));
  EXPECT_EQ(menta::io::ReadFile(a / "split.json"), menta::io::ReadFile(b / "split.json"));
}

TEST(CliTest, IngestErrorsExitTwo) {
  const auto r = Cli("ingest /nonexistent/missing.jsonl");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("parse"), std::string::npos);
  const auto dir = Dir("ingest");
  fs::create_directories(dir);
  menta::io::WriteFileAtomic(dir / "bad.jsonl", "{\"doc_id\": 1}\n");
  EXPECT_EQ(Cli("ingest " + (dir / "bad.jsonl").string()).code, 2);
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli("attack --mock --budget 0").code, 2);
  EXPECT_EQ(Cli("attack --mock --retriever sparse").code, 2);
  EXPECT_EQ(Cli("frobnicate").code, 2);
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("--help").code, 0);
}

TEST(CliTest, MissingBackendExitsThree) {
  const auto dir = Dir("nobackend");
  const auto r = Cli("attack --seed 1 --out " + dir.string(),
                     "env -u MENTA_CHAT_URL -u MENTA_NLI_URL -u MENTA_EMBED_URL");
  EXPECT_EQ(r.code, 3);
}

TEST(CliTest, AttackIsDeterministic) {
  const auto a = Dir("attack_a");
  const auto b = Dir("attack_b");
  ASSERT_EQ(Cli("attack --mock --seed 7 --out " + a.string()).code, 0);
  ASSERT_EQ(Cli("attack --mock --seed 7 --jobs 3 --out " + b.string()).code, 0);
  EXPECT_EQ(menta::io::ReadFile(a / "reports.jsonl"), menta::io::ReadFile(b / "reports.jsonl"));
  EXPECT_EQ(menta::io::ReadFile(a / "metrics.json"), menta::io::ReadFile(b / "metrics.json"));
  EXPECT_EQ(menta::io::ReadJsonFile(a / "metrics.json")["auc"], 1.0);
}

TEST(CliTest, DefenseRecordedInManifest) {
  const auto dir = Dir("dp");
  ASSERT_EQ(Cli("attack --mock --defense dp --epsilon 0.1 --out " + dir.string()).code, 0);
  const auto m = menta::io::ReadJsonFile(dir / "manifest.json");
  EXPECT_EQ(m["config"]["defenses"], json({"dp"}));
  EXPECT_EQ(m["config"]["epsilon"], 0.1);
  EXPECT_TRUE(fs::exists(dir / "metrics.json"));
}

TEST(CliTest, ConfigFileWithFlagOverride) {
  const auto dir = Dir("config");
  fs::create_directories(dir);
  menta::io::WriteFileAtomic(dir / "cfg.json",
                             R"({"budget": 3, "n_members": 8, "n_non_members": 8})");
  ASSERT_EQ(Cli("attack --mock --config " + (dir / "cfg.json").string() +
                " --members 10 --out " + (dir / "run").string())
                .code,
            0);
  const auto c = menta::io::ReadJsonFile(dir / "run" / "config.json");
  EXPECT_EQ(c["budget"], 3);
  EXPECT_EQ(c["n_members"], 10);
  EXPECT_EQ(c["n_non_members"], 8);
}

TEST(CliTest, SweepRowCounts) {
  const auto a = Dir("sweep_topk");
  ASSERT_EQ(Cli("sweep --mock --axis top_k --values 3,5,10,20 --out " + a.string()).code, 0);
  EXPECT_EQ(CountLines(a / "sweep.csv"), 5u);
  const auto b = Dir("sweep_budget");
  ASSERT_EQ(Cli("sweep --mock --axis budget --values 1..10 --members 8 --non-members 8 --out " +
                b.string())
                .code,
            0);
  EXPECT_EQ(CountLines(b / "sweep.csv"), 11u);
  EXPECT_EQ(Cli("sweep --mock --axis colour --values 1").code, 2);
}

TEST(CliTest, DetectVariants) {
  const auto dir = Dir("detect");
  ASSERT_EQ(Cli("detect --mock --generate --detector spike --rho 0.05 --out " + dir.string()).code,
            0);
  const auto spike = menta::io::ReadJsonFile(dir / "detect_spike.json");
  EXPECT_TRUE(spike["results"]["entailment"].contains("recall_on_attacks"));
  EXPECT_TRUE(spike["results"]["entailment"].contains("fpr_on_benign"));
  ASSERT_EQ(Cli("detect --mock --detector llm --queries " + (dir / "detection.jsonl").string() +
                " --out " + dir.string())
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir / "detect_llm.json"));
  EXPECT_EQ(Cli("detect --mock --detector llm --attack-set " +
                (dir / "detection.jsonl").string())
                .code,
            2);
}

TEST(CliTest, CostReports) {
  auto r = Cli("cost --model Llama3.1-8B --t-in-bb 500 --budget 5 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["nli_style"]["per_query_usd"], "1.3243e-05");
  EXPECT_EQ(j["nli_style"]["per_attack_usd"], "6.6215e-05");
  EXPECT_EQ(Cli("cost --model NoSuchModel").code, 2);

  const auto run = Dir("cost_run");
  ASSERT_EQ(Cli("attack --mock --out " + run.string()).code, 0);
  r = Cli("cost --pricing default --from-run " + run.string() + " --json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto k = json::parse(r.out);
  EXPECT_GT(k["t_in_blackbox"].get<int>(), 0);
  EXPECT_NE(k["nli_style"]["per_query_usd"], "0");
}

}  // namespace
