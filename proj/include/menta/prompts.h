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

// Prompt templates and refusal hypotheses. The text lives in assets/prompts/
// and is compiled in at build time; kAssetVersion is recorded in run
// manifests and must be bumped whenever any asset changes.

#ifndef MENTA_PROMPTS_H_
#define MENTA_PROMPTS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace menta::prompts {

inline constexpr std::string_view kAssetVersion = "prompts-v1";

namespace assets {
extern const char* const k_rag_system;
extern const char* const k_rag_user;
extern const char* const k_instruction_defense_system;
extern const char* const k_paraphrase;
extern const char* const k_query_generation;
extern const char* const k_summary;
extern const char* const k_llm_detector;
extern const char* const k_refusal_hypotheses;
}  // namespace assets

// Baseline abstention system prompt of the target RAG system.
std::string_view RagSystem();
// Context-grounded QA template with {context} and {query}.
std::string_view RagUser();
std::string_view InstructionDefenseSystem();
// {query}
std::string_view Paraphrase();
// {num_queries}, {target_document}
std::string_view QueryGeneration();
// {document}
std::string_view Summary();
// {query}
std::string_view LlmDetector();

// The seven refusal hypotheses, in asset order.
const std::vector<std::string>& RefusalHypotheses();

// The exact answer string the RAG prompt mandates for abstention.
inline constexpr std::string_view kIdkAnswer = "I don't know";

// Single-pass substitution of "{name}" placeholders. Substituted values are
// never rescanned, so a document containing "{query}" is left alone.
// Unknown placeholders are kept verbatim.
std::string Render(std::string_view tmpl,
                   const std::map<std::string, std::string, std::less<>>& vars);

}  // namespace menta::prompts

#endif  // MENTA_PROMPTS_H_
