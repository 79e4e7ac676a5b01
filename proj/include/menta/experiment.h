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


// End-to-end runner: builds the target over the member split, attacks every
// member and non-member candidate, calibrates a threshold on a seeded
// stratified calibration split and reports metrics on the rest.
//
// Output directory layout:
//   config.json      flat configuration (written first; checked on resume)
//   reports.jsonl    one MembershipReport per candidate, in corpus order
//   metrics.json     per-seed and mean metrics
//   histogram.csv    score histogram over [-1, 1]
//   manifest.json    config hash, seeds, backend identities, timings

#ifndef MENTA_EXPERIMENT_H_
#define MENTA_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "menta/attack.h"
#include "menta/backends.h"
#include "menta/corpus.h"
#include "menta/decision.h"
#include "menta/metrics.h"
#include "menta/rag_target.h"
#include "menta/retrieval.h"

namespace menta {

struct ExperimentConfig {
  // Corpus: a JSONL file, or a synthetic corpus when empty.
  std::string dataset;
  std::string split;  // split.json for `dataset`; a seeded split when empty
  size_t n_members = 20;
  size_t n_non_members = 20;
  size_t facts_per_doc = 4;

  size_t budget = 5;
  size_t top_k = 3;
  RetrieverKind retriever = RetrieverKind::kDense;
  std::vector<DefenseKind> defenses;
  double epsilon = 0.1;
  ScoringVariant scoring = ScoringVariant::kEntailment;
  int min_entailed = 1;
  std::vector<int64_t> seeds = {0};
  double calibration_fraction = 0.3;
  int max_answer_tokens = 100;

  std::string query_cache;     // JSONL sidecar; none when empty
  bool query_fixture = false;  // cache misses are errors

  void Validate() const;
  // Flat keys named after the fields above.
  nlohmann::ordered_json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  // SHA-256 of the canonical ToJson() dump.
  std::string Hash() const;
};

struct ExperimentBackends {
  std::shared_ptr<const ChatBackend> generator;
  std::shared_ptr<const ChatBackend> query_gen;
  std::shared_ptr<const ChatBackend> paraphraser;
  std::shared_ptr<const ChatBackend> detector;
  std::shared_ptr<const NliBackend> nli;
  std::shared_ptr<const EmbedBackend> embed;

  static ExperimentBackends Mock();
  // HTTP clients from MENTA_CHAT_URL / MENTA_NLI_URL / MENTA_EMBED_URL. The
  // embedding client is created only when `need_embed`.
  static ExperimentBackends FromEnv(bool need_embed);

  nlohmann::ordered_json Identities() const;
};

// The corpus, split, index and target for one seed.
struct PreparedSeed {
  int64_t seed = 0;
  std::vector<Document> candidates;  // members and non-members, labeled
  CorpusSplit split;
  std::shared_ptr<const RetrievalIndex> index;
  std::unique_ptr<RagTarget> target;
};

PreparedSeed PrepareSeed(const ExperimentConfig& cfg,
                         const ExperimentBackends& backends, int64_t seed);

struct SeedResult {
  int64_t seed = 0;
  std::vector<MembershipReport> reports;
  ThresholdCalibration calibration;
  ScoredPopulation evaluation;
  ScoredPopulation all_scores;
  MetricsRow metrics;
  size_t n_invalid = 0;
  double seconds = 0.0;
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  MetricsRow mean;
};

struct RunOptions {
  size_t jobs = 1;
  std::filesystem::path out_dir;  // no files written when empty
  bool resume = false;
};

// Throws kRunInvalid when more than 10% of a seed's reports are invalid
// (kTransport instead when every failure was a transport error).
ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const ExperimentBackends& backends,
                               const RunOptions& options = {});

// Splits valid reports into calibration and evaluation sets (stratified,
// seeded), calibrates, stamps decisions and computes metrics.
void EvaluateReports(SeedResult& result, double calibration_fraction);

nlohmann::ordered_json MetricsFileJson(const ExperimentConfig& cfg,
                                       const ExperimentResult& result);

MetricsRow MeanMetrics(const std::vector<MetricsRow>& rows);

}  // namespace menta

#endif  // MENTA_EXPERIMENT_H_
