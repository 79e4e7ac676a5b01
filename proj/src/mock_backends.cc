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

#include "menta/mock_backends.h"

#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include "menta/error.h"
#include "menta/prompts.h"
#include "menta/rag_target.h"
#include "menta/text.h"

namespace menta {
namespace {

// Literal pieces of a template, split at its {placeholders}.
std::vector<std::string_view> Literals(std::string_view tmpl) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    const size_t open = tmpl.find('{', start);
    if (open == std::string_view::npos) break;
    const size_t close = tmpl.find('}', open);
    if (close == std::string_view::npos) break;
    out.push_back(tmpl.substr(start, open - start));
    start = close + 1;
  }
  out.push_back(tmpl.substr(start));
  return out;
}

// For single-placeholder templates: the substituted value, if `text` was
// rendered from `tmpl`.
std::optional<std::string_view> MatchSingle(std::string_view tmpl,
                                            std::string_view text) {
  const auto lit = Literals(tmpl);
  if (lit.size() != 2) return std::nullopt;
  if (!text.starts_with(lit[0]) || !text.ends_with(lit[1])) return std::nullopt;
  if (text.size() < lit[0].size() + lit[1].size()) return std::nullopt;
  return text.substr(lit[0].size(), text.size() - lit[0].size() - lit[1].size());
}

struct RagPrompt {
  std::vector<std::string> contexts;
  std::string query;
};

std::optional<RagPrompt> MatchRag(std::string_view text) {
  const auto lit = Literals(prompts::RagUser());  // pre {context} mid {query} suf
  if (lit.size() != 3) return std::nullopt;
  if (!text.starts_with(lit[0]) || !text.ends_with(lit[2])) return std::nullopt;
  std::string_view body = text.substr(lit[0].size());
  body.remove_suffix(lit[2].size());
  const size_t mid = body.rfind(lit[1]);
  if (mid == std::string_view::npos) return std::nullopt;
  RagPrompt out;
  out.query = std::string(body.substr(mid + lit[1].size()));
  std::string_view ctx = body.substr(0, mid);
  // Entries are "[1] ...", "[2] ..." separated by blank lines.
  for (size_t i = 1;; ++i) {
    const std::string marker = "[" + std::to_string(i) + "] ";
    if (!ctx.starts_with(marker)) break;
    ctx.remove_prefix(marker.size());
    const std::string next = "\n\n[" + std::to_string(i + 1) + "] ";
    const size_t pos = ctx.find(next);
    if (pos == std::string_view::npos) {
      out.contexts.emplace_back(ctx);
      break;
    }
    out.contexts.emplace_back(ctx.substr(0, pos));
    ctx.remove_prefix(pos + 2);
  }
  return out;
}

struct QueryGenPrompt {
  size_t n = 0;
  std::string document;
};

std::optional<QueryGenPrompt> MatchQueryGen(std::string_view text) {
  const auto lit = Literals(prompts::QueryGeneration());
  if (lit.size() < 4 || !text.starts_with(lit[0])) return std::nullopt;
  text.remove_prefix(lit[0].size());
  size_t digits = 0;
  while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) {
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  QueryGenPrompt out;
  out.n = std::stoul(std::string(text.substr(0, digits)));
  text.remove_prefix(digits);
  if (!text.starts_with(lit[1])) return std::nullopt;
  text.remove_prefix(lit[1].size());
  const size_t end = text.rfind(lit[2]);
  if (end == std::string_view::npos) return std::nullopt;
  out.document = std::string(text.substr(0, end));
  return out;
}

// Keeps leading/trailing punctuation around a swapped function word.
std::string SwapWord(const std::string& token,
                     const std::map<std::string, std::string>& table) {
  size_t b = 0;
  size_t e = token.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
  const std::string core = token.substr(b, e - b);
  auto it = table.find(text::ToLower(core));
  if (it == table.end()) return token;
  std::string repl = it->second;
  if (!core.empty() && std::isupper(static_cast<unsigned char>(core[0]))) {
    repl[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(repl[0])));
  }
  return token.substr(0, b) + repl + token.substr(e);
}

}  // namespace

ChatResponse MockChatBackend::Chat(const ChatRequest& req) const {
  req.Validate();
  const std::string& user = req.LastUser();
  std::string reply;
  if (auto qg = MatchQueryGen(user)) {
    const auto questions = MockQuestions(qg->document, qg->n);
    std::vector<std::string> lines;
    for (size_t i = 0; i < questions.size(); ++i) {
      lines.push_back("QUERY_" + std::to_string(i + 1) + ": " + questions[i]);
    }
    reply = text::Join(lines, "\n");
  } else if (auto doc = MatchSingle(prompts::Summary(), user)) {
    reply = MockSummary(*doc);
  } else if (auto q = MatchSingle(prompts::Paraphrase(), user)) {
    reply = MockParaphrase(*q, req.seed.value_or(0));
  } else if (auto dq = MatchSingle(prompts::LlmDetector(), user)) {
    reply = MockDetectorReply(*dq);
  } else if (auto rag = MatchRag(user)) {
    reply = MockGeneratorRule(rag->contexts, rag->query);
  } else {
    reply = user;
  }

  ChatResponse resp;
  resp.text = text::TruncateToTokens(reply, req.max_output_tokens);
  size_t input_chars = 0;
  for (const auto& m : req.messages) input_chars += m.content.size();
  resp.input_tokens = static_cast<int>((input_chars + 3) / 4);
  resp.output_tokens = text::EstimateTokens(resp.text);
  return resp;
}

NliVerdict MockNliBackend::Nli(std::string_view premise,
                               std::string_view hypothesis) const {
  ValidateNliInput(premise, hypothesis);
  const auto hyp = text::ContentTokens(hypothesis);
  double r = 0.0;
  if (!hyp.empty()) {
    const auto prem = text::ContentTokenSet(premise);
    size_t hit = 0;
    for (const auto& t : hyp) hit += prem.contains(t);
    r = static_cast<double>(hit) / static_cast<double>(hyp.size());
  }
  NliVerdict v;
  v.p_ent = r;
  v.p_con = 0.1 * (1.0 - r);
  v.p_neu = 1.0 - v.p_ent - v.p_con;
  const double sum = v.p_ent + v.p_neu + v.p_con;
  v.p_ent /= sum;
  v.p_neu /= sum;
  v.p_con /= sum;
  return v;
}

MockEmbedBackend::MockEmbedBackend(size_t dim) : dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("embedding dim must be > 0");
}

EmbeddingVector MockEmbedBackend::Embed(std::string_view input) const {
  if (input.empty()) throw InvalidArgument("embed text is empty");
  auto tokens = text::Tokenize(input);
  std::vector<std::string> content;
  for (auto& t : tokens) {
    if (!text::IsStopword(t)) content.push_back(t);
  }
  const auto& use = content.empty() ? tokens : content;
  if (use.empty()) throw InvalidArgument("embed text has no word tokens");
  EmbeddingVector v;
  v.values.assign(dim_, 0.0);
  for (const auto& t : use) v.values[text::Fnv1a64(t) % dim_] += 1.0;
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v.values) x /= norm;
  return v;
}

std::string MockEmbedBackend::Identity() const {
  return "mock:embed:" + std::to_string(dim_);
}

std::string MockSummary(std::string_view document) {
  std::string_view first_line = document.substr(0, document.find('\n'));
  const auto sentences = text::SplitSentences(first_line);
  const std::string first = sentences.empty() ? text::Trim(first_line)
                                              : sentences.front();
  auto words = text::SplitWhitespace(first);
  if (words.size() > 40) words.resize(40);
  return text::Join(words, " ");
}

std::vector<std::string> MockQuestions(std::string_view document, size_t n) {
  static constexpr std::string_view kForms[][2] = {
      {"What is reported about ", "?"},
      {"Which details are given for ", "?"},
      {"How is ", " described?"},
  };
  auto sentences = text::SplitSentences(document);
  if (sentences.empty()) sentences.push_back(text::Trim(document));
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    const size_t m = sentences.size();
    auto tokens = text::ContentTokens(sentences[i % m]);
    if (tokens.empty()) tokens = text::Tokenize(sentences[i % m]);
    const size_t keep = (2 * tokens.size() + 2) / 3;
    tokens.resize(keep);
    const auto& form = kForms[(i + i / m) % std::size(kForms)];
    out.push_back(std::string(form[0]) + text::Join(tokens, " ") +
                  std::string(form[1]));
  }
  return out;
}

std::string MockParaphrase(std::string_view query, int64_t seed) {
  static const std::map<std::string, std::string> kEven = {
      {"what", "which"}, {"which", "what"}, {"is", "was"},   {"was", "is"},
      {"are", "were"},   {"were", "are"},   {"of", "from"},  {"from", "of"},
      {"with", "and"},   {"and", "with"},   {"about", "on"}, {"on", "about"},
      {"for", "to"},     {"to", "for"},     {"in", "at"},    {"at", "in"},
  };
  static const std::map<std::string, std::string> kOdd = {
      {"what", "which"}, {"which", "what"}, {"the", "that"}, {"that", "the"},
      {"is", "was"},     {"was", "is"},     {"of", "in"},    {"in", "of"},
      {"for", "on"},     {"on", "for"},     {"how", "what"},
  };
  const auto& table = (seed % 2 == 0) ? kEven : kOdd;
  std::vector<std::string> out;
  for (const auto& tok : text::SplitWhitespace(query)) {
    out.push_back(SwapWord(tok, table));
  }
  return text::Join(out, " ");
}

std::string MockDetectorReply(std::string_view query) {
  return text::ContentTokens(query).size() >= 8 ? "Yes" : "No";
}

}  // namespace menta
