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

#include "menta/attack.h"

#include <fstream>
#include <regex>
#include <set>

#include "menta/io.h"
#include "menta/prompts.h"
#include "menta/text.h"

namespace menta {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> ParseQueryList(std::string_view reply, size_t n) {
  static const std::regex kMarker(R"(QUERY_(\d+)\s*:)");
  const std::string body(reply);
  std::vector<std::pair<std::string, std::string>> found;  // marker, text
  size_t text_start = 0;
  std::string marker;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), kMarker);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (!marker.empty()) {
      found.emplace_back(marker, body.substr(text_start, m.position(0) - text_start));
    }
    marker = m[1].str();
    text_start = m.position(0) + m.length(0);
  }
  if (!marker.empty()) found.emplace_back(marker, body.substr(text_start));

  std::vector<std::string> out;
  std::set<std::string> seen_markers;
  for (const auto& [num, raw] : found) {
    if (out.size() == n) break;
    const std::string q = text::Trim(raw);
    if (q.empty() || !seen_markers.insert(num).second) continue;
    out.push_back(q);
  }
  if (out.size() < n) {
    throw Error(ErrorCode::kShortfall,
                "question generation returned " + std::to_string(out.size()) +
                    " of " + std::to_string(n) + " queries");
  }
  return out;
}

QuerySet GenerateQuerySet(const Document& doc, size_t n,
                          const ChatBackend& chat, int64_t seed) {
  if (n < 1) throw InvalidArgument("query count must be >= 1");
  QuerySet set;
  set.doc_id = doc.doc_id;
  set.n = n;
  set.seed = seed;

  ChatRequest summary_req;
  summary_req.messages = {
      {Role::kUser, prompts::Render(prompts::Summary(), {{"document", doc.text}})}};
  summary_req.max_output_tokens = 100;
  summary_req.seed = seed;
  set.summary = text::Trim(chat.Chat(summary_req).text);
  if (set.summary.empty()) {
    throw Error(ErrorCode::kBackend, "summary reply is empty for " + doc.doc_id);
  }

  ChatRequest gen_req;
  gen_req.messages = {
      {Role::kUser,
       prompts::Render(prompts::QueryGeneration(),
                       {{"num_queries", std::to_string(n)},
                        {"target_document", doc.text}})}};
  gen_req.max_output_tokens = static_cast<int>(64 * n + 64);
  gen_req.seed = seed;
  set.questions = ParseQueryList(chat.Chat(gen_req).text, n);
  return set;
}

std::vector<AttackQuery> BuildAttackQueries(const QuerySet& set) {
  std::vector<AttackQuery> out;
  out.reserve(set.questions.size());
  for (const auto& q : set.questions) {
    out.push_back({set.doc_id, q, set.summary, set.summary + " " + q});
  }
  return out;
}

ordered_json QuerySetToJson(const QuerySet& set) {
  ordered_json j;
  j["doc_id"] = set.doc_id;
  j["n"] = set.n;
  j["seed"] = set.seed;
  j["summary"] = set.summary;
  j["questions"] = set.questions;
  return j;
}

QuerySet QuerySetFromJson(const json& j) {
  QuerySet set;
  set.doc_id = j.at("doc_id").get<std::string>();
  set.n = j.at("n").get<size_t>();
  set.seed = j.at("seed").get<int64_t>();
  set.summary = j.at("summary").get<std::string>();
  set.questions = j.at("questions").get<std::vector<std::string>>();
  if (set.questions.size() != set.n) {
    throw Error(ErrorCode::kParse, "cached query set for " + set.doc_id +
                                       " holds " +
                                       std::to_string(set.questions.size()) +
                                       " questions, expected " +
                                       std::to_string(set.n));
  }
  return set;
}

QueryCache::QueryCache(std::filesystem::path path, bool fixture_only)
    : path_(std::move(path)), fixture_only_(fixture_only) {
  std::ifstream in(path_);
  if (!in) {
    if (fixture_only_) {
      throw Error(ErrorCode::kIo, "query fixture not found: " + path_.string());
    }
    return;
  }
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    try {
      QuerySet set = QuerySetFromJson(json::parse(line));
      Key key{set.doc_id, set.n, set.seed};
      entries_.insert_or_assign(std::move(key), std::move(set));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, path_.string() + " line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
  }
}

std::optional<QuerySet> QueryCache::Find(std::string_view doc_id, size_t n,
                                         int64_t seed) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(Key{std::string(doc_id), n, seed});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void QueryCache::Put(const QuerySet& set) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(Key{set.doc_id, set.n, set.seed}, set);
  io::AppendLine(path_, QuerySetToJson(set).dump());
}

size_t QueryCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::vector<AttackQuery> GenerateQueries(const Document& doc, size_t n,
                                         const ChatBackend& chat, int64_t seed,
                                         QueryCache* cache) {
  if (n < 1) throw InvalidArgument("query count must be >= 1");
  if (cache) {
    if (auto hit = cache->Find(doc.doc_id, n, seed)) {
      return BuildAttackQueries(*hit);
    }
    if (cache->fixture_only()) {
      throw Error(ErrorCode::kConfiguration,
                  "no fixture queries for doc '" + doc.doc_id + "' (n=" +
                      std::to_string(n) + ", seed=" + std::to_string(seed) +
                      ")");
    }
  }
  QuerySet set = GenerateQuerySet(doc, n, chat, seed);
  if (cache) cache->Put(set);
  return BuildAttackQueries(set);
}

std::vector<std::string> SplitClaims(std::string_view answer) {
  std::vector<std::string> claims;
  std::string carry;
  for (auto& frag : text::SplitSentences(answer)) {
    if (!carry.empty()) {
      frag = carry + " " + frag;
      carry.clear();
    }
    if (frag.size() >= kMinClaimChars) {
      claims.push_back(std::move(frag));
    } else if (claims.empty()) {
      carry = std::move(frag);
    } else {
      claims.back() += " " + frag;
    }
  }
  if (!carry.empty()) claims.push_back(std::move(carry));
  return claims;
}

bool IsIdkAnswer(std::string_view answer) {
  return text::ToLower(text::Trim(answer)) == "i don't know";
}

int EntailmentIndicator(const std::vector<ClaimVerdict>& claims,
                        int min_entailed) {
  if (min_entailed < 1) throw InvalidArgument("min_entailed must be >= 1");
  int hits = 0;
  for (const auto& c : claims) hits += c.entailed;
  return hits >= min_entailed ? 1 : 0;
}

QuerySignal ScoreQuery(const Document& doc, std::string_view answer,
                       const NliBackend& nli, int min_entailed) {
  if (min_entailed < 1) throw InvalidArgument("min_entailed must be >= 1");
  QuerySignal signal;
  if (IsIdkAnswer(answer)) {
    signal.i_idk = 1;
    signal.idk_fast_path = true;
    return signal;
  }
  const auto claims = SplitClaims(answer);
  if (claims.empty()) {
    signal.i_idk = 1;
    return signal;
  }
  const auto& hypotheses = prompts::RefusalHypotheses();
  for (size_t i = 0; i < claims.size(); ++i) {
    ClaimVerdict cv;
    cv.claim = claims[i];
    try {
      cv.doc_verdict = nli.Nli(doc.text, cv.claim);
      cv.entailed = cv.doc_verdict.Entailed();
      for (const auto& v : nli.NliBatch(cv.claim, hypotheses)) {
        if (v.Entailed()) {
          cv.idk_hit = true;
          break;
        }
      }
    } catch (const Error& e) {
      throw e.WithContext("claim " + std::to_string(i));
    }
    signal.i_idk |= cv.idk_hit ? 1 : 0;
    signal.claims.push_back(std::move(cv));
  }
  signal.i_ent = EntailmentIndicator(signal.claims, min_entailed);
  return signal;
}

int SimilarityIndicator(const Document& doc, std::string_view answer,
                        const EmbedBackend& embed, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("similarity threshold must be in (0, 1)");
  }
  if (text::Trim(answer).empty()) return 0;
  const double sim = Cosine(embed.Embed(answer), embed.Embed(doc.text));
  return sim > threshold ? 1 : 0;
}

double MiaScore(const std::vector<int>& i_ent, const std::vector<int>& i_idk) {
  if (i_ent.empty()) throw InvalidArgument("no query signals to score");
  if (i_ent.size() != i_idk.size()) {
    throw InvalidArgument("indicator lists differ in length");
  }
  long total = 0;
  for (size_t i = 0; i < i_ent.size(); ++i) {
    if ((i_ent[i] != 0 && i_ent[i] != 1) || (i_idk[i] != 0 && i_idk[i] != 1)) {
      throw InvalidArgument("indicators must be 0 or 1");
    }
    total += i_ent[i] - i_idk[i];
  }
  return static_cast<double>(total) / static_cast<double>(i_ent.size());
}

double MiaScore(const std::vector<QuerySignal>& signals) {
  std::vector<int> ent;
  std::vector<int> idk;
  for (const auto& s : signals) {
    ent.push_back(s.i_ent);
    idk.push_back(s.i_idk);
  }
  return MiaScore(ent, idk);
}

std::string_view ScoringVariantName(ScoringVariant v) {
  return v == ScoringVariant::kEntailment ? "entailment" : "similarity";
}

ScoringVariant ParseScoringVariant(std::string_view name) {
  if (name == "entailment") return ScoringVariant::kEntailment;
  if (name == "similarity") return ScoringVariant::kSimilarity;
  throw InvalidArgument("unknown scoring variant '" + std::string(name) + "'");
}

std::vector<int> MembershipReport::EntIndicators() const {
  std::vector<int> out;
  for (const auto& q : queries) {
    if (!q.signal) continue;
    out.push_back(scoring == ScoringVariant::kSimilarity ? q.signal->i_sim.value_or(0)
                                                         : q.signal->i_ent);
  }
  return out;
}

std::vector<int> MembershipReport::IdkIndicators() const {
  std::vector<int> out;
  for (const auto& q : queries) {
    if (q.signal) out.push_back(q.signal->i_idk);
  }
  return out;
}

namespace {

ordered_json VerdictToJson(const NliVerdict& v) {
  return ordered_json{{"ent", v.p_ent}, {"neu", v.p_neu}, {"con", v.p_con}};
}

NliVerdict VerdictFromJson(const json& j) {
  return {j.at("ent").get<double>(), j.at("neu").get<double>(),
          j.at("con").get<double>()};
}

ErrorCode ParseErrorCode(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kIo); ++c) {
    if (ErrorCodeName(static_cast<ErrorCode>(c)) == name) {
      return static_cast<ErrorCode>(c);
    }
  }
  throw InvalidArgument("unknown error code '" + std::string(name) + "'");
}

void FinishReport(MembershipReport& report) {
  size_t failed = 0;
  for (const auto& q : report.queries) failed += q.signal ? 0 : 1;
  report.n_queries = report.queries.size() - failed;
  if (report.queries.empty() || 2 * failed >= report.queries.size()) {
    report.valid = false;
    report.score = 0.0;
    if (report.invalid_reason.empty()) {
      report.invalid_reason = std::to_string(failed) + " of " +
                              std::to_string(report.queries.size()) +
                              " queries failed";
    }
    return;
  }
  report.valid = true;
  report.invalid_reason.clear();
  report.score = MiaScore(report.EntIndicators(), report.IdkIndicators());
}

}  // namespace

ordered_json ReportToJson(const MembershipReport& r) {
  ordered_json j;
  j["doc_id"] = r.doc_id;
  j["label"] = MembershipName(r.label);
  j["seed"] = r.seed;
  j["budget"] = r.budget;
  j["scoring"] = ScoringVariantName(r.scoring);
  j["min_entailed"] = r.min_entailed;
  j["valid"] = r.valid;
  j["score"] = r.valid ? ordered_json(r.score) : ordered_json(nullptr);
  j["n_queries"] = r.n_queries;
  if (!r.invalid_reason.empty()) j["invalid_reason"] = r.invalid_reason;
  if (r.decision) j["decision"] = MembershipName(*r.decision);
  if (r.threshold_used) j["threshold_used"] = *r.threshold_used;
  ordered_json queries = ordered_json::array();
  for (const auto& q : r.queries) {
    ordered_json qj;
    qj["question"] = q.query.question;
    qj["summary"] = q.query.summary;
    qj["final_query"] = q.query.final_query;
    if (q.exchange) {
      const auto& ex = *q.exchange;
      qj["effective_query"] = ex.effective_query;
      qj["answer"] = ex.answer;
      qj["input_tokens"] = ex.input_tokens;
      qj["output_tokens"] = ex.output_tokens;
      qj["paraphrase_fallback"] = ex.paraphrase_fallback;
      qj["retrieved"] = ex.retrieved_doc_ids;
    }
    if (q.signal) {
      const auto& s = *q.signal;
      qj["i_ent"] = s.i_ent;
      qj["i_idk"] = s.i_idk;
      if (s.i_sim) qj["i_sim"] = *s.i_sim;
      qj["idk_fast_path"] = s.idk_fast_path;
      ordered_json claims = ordered_json::array();
      for (const auto& c : s.claims) {
        claims.push_back(ordered_json{{"claim", c.claim},
                                      {"verdict", VerdictToJson(c.doc_verdict)},
                                      {"entailed", c.entailed},
                                      {"idk_hit", c.idk_hit}});
      }
      qj["claims"] = std::move(claims);
    }
    if (!q.error.empty()) {
      qj["error"] = q.error;
      if (q.error_code) qj["error_code"] = ErrorCodeName(*q.error_code);
    }
    queries.push_back(std::move(qj));
  }
  j["queries"] = std::move(queries);
  return j;
}

MembershipReport ReportFromJson(const json& j) {
  MembershipReport r;
  r.doc_id = j.at("doc_id").get<std::string>();
  r.label = ParseMembership(j.at("label").get<std::string>());
  r.seed = j.at("seed").get<int64_t>();
  r.budget = j.at("budget").get<size_t>();
  r.scoring = ParseScoringVariant(j.at("scoring").get<std::string>());
  r.min_entailed = j.at("min_entailed").get<int>();
  r.valid = j.at("valid").get<bool>();
  if (r.valid) r.score = j.at("score").get<double>();
  r.n_queries = j.at("n_queries").get<size_t>();
  r.invalid_reason = j.value("invalid_reason", "");
  if (j.contains("decision")) {
    r.decision = ParseMembership(j["decision"].get<std::string>());
  }
  if (j.contains("threshold_used")) {
    r.threshold_used = j["threshold_used"].get<double>();
  }
  for (const auto& qj : j.at("queries")) {
    QueryRecord q;
    q.query.target_doc_id = r.doc_id;
    q.query.question = qj.at("question").get<std::string>();
    q.query.summary = qj.at("summary").get<std::string>();
    q.query.final_query = qj.at("final_query").get<std::string>();
    if (qj.contains("answer")) {
      ExchangeRecord ex;
      ex.effective_query = qj.at("effective_query").get<std::string>();
      ex.answer = qj.at("answer").get<std::string>();
      ex.input_tokens = qj.at("input_tokens").get<int>();
      ex.output_tokens = qj.at("output_tokens").get<int>();
      ex.paraphrase_fallback = qj.at("paraphrase_fallback").get<bool>();
      ex.retrieved_doc_ids = qj.at("retrieved").get<std::vector<std::string>>();
      q.exchange = std::move(ex);
    }
    if (qj.contains("i_ent")) {
      QuerySignal s;
      s.i_ent = qj.at("i_ent").get<int>();
      s.i_idk = qj.at("i_idk").get<int>();
      if (qj.contains("i_sim")) s.i_sim = qj["i_sim"].get<int>();
      s.idk_fast_path = qj.at("idk_fast_path").get<bool>();
      for (const auto& cj : qj.at("claims")) {
        s.claims.push_back({cj.at("claim").get<std::string>(),
                            VerdictFromJson(cj.at("verdict")),
                            cj.at("entailed").get<bool>(),
                            cj.at("idk_hit").get<bool>()});
      }
      q.signal = std::move(s);
    }
    q.error = qj.value("error", "");
    if (qj.contains("error_code")) {
      q.error_code = ParseErrorCode(qj["error_code"].get<std::string>());
    }
    r.queries.push_back(std::move(q));
  }
  return r;
}

void AttackOptions::Validate() const {
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  if (min_entailed < 1) throw InvalidArgument("min_entailed must be >= 1");
  if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0)) {
    throw InvalidArgument("similarity threshold must be in (0, 1)");
  }
}

MembershipReport AttackDocument(const Document& doc, const RagTarget& target,
                                const AttackBackends& backends,
                                const AttackOptions& options) {
  options.Validate();
  if (!backends.nli) throw Error(ErrorCode::kConfiguration, "no NLI backend");
  if (!backends.query_gen && !(options.cache && options.cache->fixture_only())) {
    throw Error(ErrorCode::kConfiguration, "no query generation backend");
  }
  if (options.scoring == ScoringVariant::kSimilarity && !backends.embed) {
    throw Error(ErrorCode::kConfiguration,
                "similarity scoring needs an embedding backend");
  }

  MembershipReport report;
  report.doc_id = doc.doc_id;
  report.label = doc.membership;
  report.seed = options.seed;
  report.budget = options.budget;
  report.scoring = options.scoring;
  report.min_entailed = options.min_entailed;

  std::vector<AttackQuery> queries;
  try {
    std::optional<QuerySet> cached;
    if (options.cache) {
      cached = options.cache->Find(doc.doc_id, options.budget, options.seed);
    }
    if (cached) {
      queries = BuildAttackQueries(*cached);
    } else if (!backends.query_gen) {
      throw Error(ErrorCode::kConfiguration,
                  "no fixture queries for doc '" + doc.doc_id + "'");
    } else {
      queries = GenerateQueries(doc, options.budget, *backends.query_gen,
                                options.seed, options.cache);
    }
  } catch (const Error& e) {
    report.invalid_reason = std::string("query generation: ") + e.what();
    // Every query counts as failed with the generation error.
    for (size_t i = 0; i < options.budget; ++i) {
      QueryRecord q;
      q.query.target_doc_id = doc.doc_id;
      q.error = report.invalid_reason;
      q.error_code = e.code();
      report.queries.push_back(std::move(q));
    }
    FinishReport(report);
    return report;
  }

  for (auto& query : queries) {
    QueryRecord rec;
    rec.query = std::move(query);
    try {
      const RagExchange ex = target.AnswerQuery(rec.query.final_query);
      ExchangeRecord er;
      er.effective_query = ex.effective_query;
      er.answer = ex.answer;
      er.input_tokens = ex.input_tokens;
      er.output_tokens = ex.output_tokens;
      er.paraphrase_fallback = ex.paraphrase_fallback;
      for (const auto& c : ex.RetrievedForEvaluation()) {
        er.retrieved_doc_ids.push_back(c.doc_id);
      }
      rec.exchange = std::move(er);
      QuerySignal s =
          ScoreQuery(doc, rec.exchange->answer, *backends.nli, options.min_entailed);
      if (options.scoring == ScoringVariant::kSimilarity) {
        s.i_sim = SimilarityIndicator(doc, rec.exchange->answer, *backends.embed,
                                      options.similarity_threshold);
      }
      rec.signal = std::move(s);
    } catch (const Error& e) {
      rec.error = e.what();
      rec.error_code = e.code();
    }
    report.queries.push_back(std::move(rec));
  }
  FinishReport(report);
  return report;
}

MembershipReport RescoreReport(const MembershipReport& report,
                               int min_entailed) {
  if (min_entailed < 1) throw InvalidArgument("min_entailed must be >= 1");
  MembershipReport out = report;
  out.min_entailed = min_entailed;
  for (auto& q : out.queries) {
    if (q.signal) {
      q.signal->i_ent = EntailmentIndicator(q.signal->claims, min_entailed);
    }
  }
  out.decision.reset();
  out.threshold_used.reset();
  out.invalid_reason = report.valid ? "" : report.invalid_reason;
  FinishReport(out);
  return out;
}

}  // namespace menta
