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

#include "menta/rag_target.h"

#include <cmath>

#include "menta/error.h"
#include "menta/prompts.h"
#include "menta/rng.h"
#include "menta/text.h"

namespace menta {

std::string_view DefenseKindName(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::kDpOutput: return "dp";
    case DefenseKind::kRerankShuffle: return "rerank";
    case DefenseKind::kParaphrase: return "paraphrase";
    case DefenseKind::kInstruction: return "instruction";
  }
  return "unknown";
}

DefenseKind ParseDefenseKind(std::string_view name) {
  if (name == "dp" || name == "dp_output") return DefenseKind::kDpOutput;
  if (name == "rerank" || name == "rerank_shuffle") {
    return DefenseKind::kRerankShuffle;
  }
  if (name == "paraphrase") return DefenseKind::kParaphrase;
  if (name == "instruction") return DefenseKind::kInstruction;
  throw InvalidArgument("unknown defense '" + std::string(name) + "'");
}

void DefenseSpec::Validate() const {
  if (kind == DefenseKind::kDpOutput) {
    if (!epsilon || !(*epsilon > 0.0)) {
      throw InvalidArgument("dp defense needs epsilon > 0");
    }
  } else if (epsilon) {
    throw InvalidArgument("epsilon is only valid for the dp defense");
  }
}

void RagConfig::Validate() const {
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  if (max_answer_tokens < 1) {
    throw InvalidArgument("max_answer_tokens must be >= 1");
  }
  if (!generator) throw Error(ErrorCode::kConfiguration, "no generator");
  if (!index) throw Error(ErrorCode::kConfiguration, "no retrieval index");
  for (const auto& d : defenses) d.Validate();
}

RagTarget::RagTarget(RagConfig config) : config_(std::move(config)) {
  config_.Validate();
}

const DefenseSpec* RagTarget::FindDefense(DefenseKind kind) const {
  for (const auto& d : config_.defenses) {
    if (d.kind == kind) return &d;
  }
  return nullptr;
}

std::string FormatContexts(const std::vector<std::string>& contexts) {
  std::string out;
  for (size_t i = 0; i < contexts.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "[" + std::to_string(i + 1) + "] " + contexts[i];
  }
  return out;
}

std::vector<ChatMessage> RagTarget::BuildPrompt(
    std::string_view query, const std::vector<std::string>& contexts) const {
  const std::string_view system = FindDefense(DefenseKind::kInstruction)
                                      ? prompts::InstructionDefenseSystem()
                                      : prompts::RagSystem();
  std::string user = prompts::Render(
      prompts::RagUser(),
      {{"context", FormatContexts(contexts)}, {"query", std::string(query)}});
  return {{Role::kSystem, std::string(system)}, {Role::kUser, std::move(user)}};
}

RagExchange RagTarget::AnswerQuery(std::string_view query) const {
  if (text::Trim(query).empty()) throw InvalidArgument("query is empty");
  RagExchange ex;
  ex.original_query = std::string(query);
  ex.effective_query = ex.original_query;

  if (const auto* d = FindDefense(DefenseKind::kParaphrase)) {
    const ChatBackend& backend =
        config_.paraphraser ? *config_.paraphraser : *config_.generator;
    try {
      auto p = ParaphraseQuery(query, backend, static_cast<int64_t>(d->seed));
      ex.effective_query = std::move(p.text);
      ex.paraphrase_fallback = p.fell_back;
    } catch (const Error& e) {
      throw e.WithContext("paraphrase");
    }
  }

  try {
    ex.retrieved_ = config_.index->Retrieve(ex.effective_query, config_.top_k);
  } catch (const Error& e) {
    throw e.WithContext("retrieve");
  }

  if (const auto* d = FindDefense(DefenseKind::kRerankShuffle)) {
    Rng rng(DeriveSeed(d->seed, "rerank:" + ex.effective_query));
    rng.Shuffle(ex.retrieved_);
    for (size_t i = 0; i < ex.retrieved_.size(); ++i) {
      ex.retrieved_[i].rank = i + 1;
    }
  }

  std::vector<std::string> contexts;
  contexts.reserve(ex.retrieved_.size());
  for (const auto& r : ex.retrieved_) {
    contexts.push_back(config_.index->Find(r.doc_id)->text);
  }

  ChatRequest req;
  req.messages = BuildPrompt(ex.effective_query, contexts);
  req.max_output_tokens = config_.max_answer_tokens;
  req.temperature = config_.temperature;
  req.seed = config_.generator_seed;
  ChatResponse resp;
  try {
    resp = config_.generator->Chat(req);
  } catch (const Error& e) {
    throw e.WithContext("generate");
  }
  ex.answer = text::Trim(resp.text);
  ex.input_tokens = resp.input_tokens;
  ex.output_tokens = resp.output_tokens;

  if (const auto* d = FindDefense(DefenseKind::kDpOutput)) {
    ex.answer = DpPerturb(ex.answer, *d->epsilon,
                          DeriveSeed(d->seed, "dp:" + ex.original_query));
  }
  return ex;
}

double DpDropProbability(double epsilon) {
  return 1.0 / (1.0 + std::exp(epsilon));
}

std::string DpPerturb(std::string_view text, double epsilon, uint64_t seed) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  const double q = DpDropProbability(epsilon);
  Rng rng(seed);
  std::vector<std::string> kept;
  for (auto& tok : text::SplitWhitespace(text)) {
    if (rng.Uniform01() >= q) kept.push_back(std::move(tok));
  }
  return text::Join(kept, " ");
}

ParaphraseResult ParaphraseQuery(std::string_view query,
                                 const ChatBackend& backend, int64_t seed) {
  ChatRequest req;
  req.messages = {{Role::kUser, prompts::Render(prompts::Paraphrase(),
                                                {{"query", std::string(query)}})}};
  req.max_output_tokens = std::max(16, 2 * text::EstimateTokens(query) + 16);
  req.seed = seed;
  const auto resp = backend.Chat(req);
  std::string out = text::Trim(resp.text);
  if (out.empty()) return {std::string(query), true};
  return {std::move(out), false};
}

std::string MockGeneratorRule(const std::vector<std::string>& contexts,
                              std::string_view query, double threshold) {
  const auto query_tokens = text::ContentTokenSet(query);
  double best = -1.0;
  size_t best_ctx = 0;
  size_t best_sent = 0;
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(contexts.size());
  for (size_t c = 0; c < contexts.size(); ++c) {
    sentences.push_back(text::SplitSentences(contexts[c]));
    for (size_t s = 0; s < sentences[c].size(); ++s) {
      const auto tokens = text::ContentTokens(sentences[c][s]);
      if (tokens.empty()) continue;
      size_t hit = 0;
      for (const auto& t : tokens) hit += query_tokens.contains(t);
      const double ratio =
          static_cast<double>(hit) / static_cast<double>(tokens.size());
      if (ratio > best) {
        best = ratio;
        best_ctx = c;
        best_sent = s;
      }
    }
  }
  if (best < threshold || best < 0.0) return std::string(prompts::kIdkAnswer);
  const auto& chosen = sentences[best_ctx];
  const size_t end = std::min(chosen.size(), best_sent + 3);
  return text::Join({chosen.begin() + best_sent, chosen.begin() + end}, " ");
}

}  // namespace menta
