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

// The membership attack: document-specific questions with a summary prefix,
// answers split into claims, claims scored for entailment against the
// candidate document and for abstention against fixed refusal hypotheses,
// and per-query indicators averaged into a score in [-1, 1].

#ifndef MENTA_ATTACK_H_
#define MENTA_ATTACK_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "menta/backends.h"
#include "menta/corpus.h"
#include "menta/error.h"
#include "menta/rag_target.h"

namespace menta {

struct AttackQuery {
  std::string target_doc_id;
  std::string question;
  std::string summary;
  std::string final_query;  // summary + " " + question
};

// Output of the two offline generation calls for one document.
struct QuerySet {
  std::string doc_id;
  size_t n = 0;
  int64_t seed = 0;
  std::string summary;
  std::vector<std::string> questions;
};

// Splits the reply at "QUERY_i:" markers, on one line or many, and keeps the
// first n non-empty questions with distinct markers.
// Throws kShortfall naming the parsed count when fewer than n are present.
std::vector<std::string> ParseQueryList(std::string_view reply, size_t n);

// One summary call and one question-generation call.
QuerySet GenerateQuerySet(const Document& doc, size_t n,
                          const ChatBackend& chat, int64_t seed);

std::vector<AttackQuery> BuildAttackQueries(const QuerySet& set);

// JSONL sidecar of QuerySets keyed by (doc_id, n, seed). In fixture mode a
// miss is an error and no chat call is ever made. Thread-safe.
class QueryCache {
 public:
  QueryCache(std::filesystem::path path, bool fixture_only = false);

  std::optional<QuerySet> Find(std::string_view doc_id, size_t n,
                               int64_t seed) const;
  // Stores in memory and appends to the file.
  void Put(const QuerySet& set);
  bool fixture_only() const { return fixture_only_; }
  size_t size() const;

 private:
  using Key = std::tuple<std::string, size_t, int64_t>;
  std::filesystem::path path_;
  bool fixture_only_;
  mutable std::mutex mu_;
  std::map<Key, QuerySet> entries_;
};

nlohmann::ordered_json QuerySetToJson(const QuerySet& set);
QuerySet QuerySetFromJson(const nlohmann::json& j);

// Generates (or loads from `cache`) n queries for `doc`.
std::vector<AttackQuery> GenerateQueries(const Document& doc, size_t n,
                                         const ChatBackend& chat, int64_t seed,
                                         QueryCache* cache = nullptr);

inline constexpr size_t kMinClaimChars = 15;

// Sentence split on '.', '?' or '!' followed by whitespace or the end.
// Fragments shorter than kMinClaimChars merge into the previous claim, or
// into the next one when there is no previous claim.
std::vector<std::string> SplitClaims(std::string_view answer);

// Case-folded, trimmed answer equals "i don't know".
bool IsIdkAnswer(std::string_view answer);

struct ClaimVerdict {
  std::string claim;
  NliVerdict doc_verdict;
  bool entailed = false;
  bool idk_hit = false;
};

struct QuerySignal {
  int i_ent = 0;
  int i_idk = 0;
  std::vector<ClaimVerdict> claims;
  bool idk_fast_path = false;
  // Similarity-variant indicator, when that variant is scored.
  std::optional<int> i_sim;
};

// Entailment premise is doc.text; abstention checks each claim as premise
// against every refusal hypothesis. Errors name the failing claim index.
QuerySignal ScoreQuery(const Document& doc, std::string_view answer,
                       const NliBackend& nli, int min_entailed = 1);

// i_ent from already-scored claims under a different min_entailed.
int EntailmentIndicator(const std::vector<ClaimVerdict>& claims,
                        int min_entailed);

// 1 iff cosine(embed(answer), embed(doc.text)) > threshold. An empty answer
// scores 0.
int SimilarityIndicator(const Document& doc, std::string_view answer,
                        const EmbedBackend& embed, double threshold = 0.7);

double MiaScore(const std::vector<int>& i_ent, const std::vector<int>& i_idk);
double MiaScore(const std::vector<QuerySignal>& signals);

enum class ScoringVariant { kEntailment, kSimilarity };

std::string_view ScoringVariantName(ScoringVariant v);
ScoringVariant ParseScoringVariant(std::string_view name);

// What the report keeps of one target exchange.
struct ExchangeRecord {
  std::string effective_query;
  std::string answer;
  int input_tokens = 0;
  int output_tokens = 0;
  bool paraphrase_fallback = false;
  std::vector<std::string> retrieved_doc_ids;  // evaluation diagnostics
};

struct QueryRecord {
  AttackQuery query;
  std::optional<ExchangeRecord> exchange;
  std::optional<QuerySignal> signal;
  std::string error;  // non-empty iff the query failed
  std::optional<ErrorCode> error_code;
};

struct MembershipReport {
  std::string doc_id;
  Membership label = Membership::kNonMember;  // ground truth, evaluation only
  int64_t seed = 0;
  size_t budget = 0;
  ScoringVariant scoring = ScoringVariant::kEntailment;
  int min_entailed = 1;
  std::vector<QueryRecord> queries;
  bool valid = false;
  std::string invalid_reason;
  double score = 0.0;      // meaningful iff valid
  size_t n_queries = 0;    // scored queries
  std::optional<Membership> decision;
  std::optional<double> threshold_used;

  // The indicator lists behind `score`, in query order.
  std::vector<int> EntIndicators() const;
  std::vector<int> IdkIndicators() const;
};

nlohmann::ordered_json ReportToJson(const MembershipReport& report);
MembershipReport ReportFromJson(const nlohmann::json& j);

struct AttackBackends {
  std::shared_ptr<const ChatBackend> query_gen;
  std::shared_ptr<const NliBackend> nli;
  std::shared_ptr<const EmbedBackend> embed;  // similarity variant only
};

struct AttackOptions {
  size_t budget = 5;
  int min_entailed = 1;
  ScoringVariant scoring = ScoringVariant::kEntailment;
  double similarity_threshold = 0.7;
  int64_t seed = 0;
  QueryCache* cache = nullptr;

  void Validate() const;
};

// Runs the whole attack against one candidate. Per-query failures are
// recorded; when at least half of the queries fail the report is invalid
// and carries no score.
MembershipReport AttackDocument(const Document& doc, const RagTarget& target,
                                const AttackBackends& backends,
                                const AttackOptions& options);

// Recomputes indicators and score from stored claim verdicts.
MembershipReport RescoreReport(const MembershipReport& report,
                               int min_entailed);

}  // namespace menta

#endif  // MENTA_ATTACK_H_
