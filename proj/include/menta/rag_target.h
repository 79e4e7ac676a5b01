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

// The simulated black-box RAG system under attack, with optional defense
// middleware. Pipeline order is fixed:
//
//   paraphrase -> retrieve top_k -> rerank shuffle -> generate -> DP output
//
// Callers on the attack side consume RagExchange::answer only; retrieval
// diagnostics sit behind RetrievedForEvaluation().

#ifndef MENTA_RAG_TARGET_H_
#define MENTA_RAG_TARGET_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "menta/backends.h"
#include "menta/retrieval.h"

namespace menta {

enum class DefenseKind { kDpOutput, kRerankShuffle, kParaphrase, kInstruction };

std::string_view DefenseKindName(DefenseKind kind);
// Accepts the CLI spellings: dp, rerank, paraphrase, instruction.
DefenseKind ParseDefenseKind(std::string_view name);

struct DefenseSpec {
  DefenseKind kind = DefenseKind::kRerankShuffle;
  std::optional<double> epsilon;  // present iff kind == kDpOutput
  uint64_t seed = 0;

  static DefenseSpec Dp(double epsilon, uint64_t seed = 0) {
    return {DefenseKind::kDpOutput, epsilon, seed};
  }
  static DefenseSpec Of(DefenseKind kind, uint64_t seed = 0) {
    return {kind, std::nullopt, seed};
  }
  void Validate() const;
};

struct RagConfig {
  size_t top_k = 3;
  int max_answer_tokens = 100;
  std::vector<DefenseSpec> defenses;
  std::shared_ptr<const ChatBackend> generator;
  // Backend for the paraphrase defense; the generator when unset.
  std::shared_ptr<const ChatBackend> paraphraser;
  std::shared_ptr<const RetrievalIndex> index;
  double temperature = 0.0;
  int64_t generator_seed = 0;

  void Validate() const;
};

class RagExchange {
 public:
  std::string original_query;
  std::string effective_query;
  std::string answer;
  int input_tokens = 0;
  int output_tokens = 0;
  bool paraphrase_fallback = false;

  // Evaluation-only: which documents the target retrieved, after any
  // rerank. The attack never reads this.
  const std::vector<RetrievedContext>& RetrievedForEvaluation() const {
    return retrieved_;
  }

 private:
  friend class RagTarget;
  std::vector<RetrievedContext> retrieved_;
};

class RagTarget {
 public:
  explicit RagTarget(RagConfig config);

  // Reentrant. Backend failures are rethrown with the stage name prefixed
  // ("paraphrase", "retrieve", "generate").
  RagExchange AnswerQuery(std::string_view query) const;

  const RagConfig& config() const { return config_; }

  // The prompt the generator receives, exposed for tests and diagnostics.
  std::vector<ChatMessage> BuildPrompt(
      std::string_view query, const std::vector<std::string>& contexts) const;

 private:
  const DefenseSpec* FindDefense(DefenseKind kind) const;

  RagConfig config_;
};

// Context block: "[i] text" entries joined by blank lines, in rank order.
std::string FormatContexts(const std::vector<std::string>& contexts);

// Token-level randomized dropout: every whitespace-delimited token is dropped
// independently with probability 1 / (1 + e^epsilon); survivors keep their
// order and are joined by single spaces.
std::string DpPerturb(std::string_view text, double epsilon, uint64_t seed);

double DpDropProbability(double epsilon);

struct ParaphraseResult {
  std::string text;
  bool fell_back = false;  // empty reply; the original query was kept
};

ParaphraseResult ParaphraseQuery(std::string_view query,
                                 const ChatBackend& backend,
                                 int64_t seed = 0);

// Deterministic desk-scale generator. Scores every context sentence by the
// fraction of its content tokens that also occur in the query; if the best
// ratio reaches `threshold` the answer is that sentence followed by up to two
// further sentences of the same context, otherwise "I don't know". Ties go to
// the earlier context, then the earlier sentence.
std::string MockGeneratorRule(const std::vector<std::string>& contexts,
                              std::string_view query, double threshold = 0.5);

}  // namespace menta

#endif  // MENTA_RAG_TARGET_H_
