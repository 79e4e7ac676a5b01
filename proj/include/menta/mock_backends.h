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

// Deterministic stand-ins for the model backends. Each is a pure function of
// its inputs (and request seed), so desk-scale runs are reproducible
// byte-for-byte and need no network.

#ifndef MENTA_MOCK_BACKENDS_H_
#define MENTA_MOCK_BACKENDS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "menta/backends.h"

namespace menta {

// One chat mock for every role. It recognises the prompt by its template and
// answers with the matching rule:
//   query generation  -> MockQuestions()
//   summary           -> MockSummary()
//   paraphrase        -> MockParaphrase()
//   LLM detector      -> MockDetectorReply()
//   RAG QA template   -> MockGeneratorRule() over the parsed contexts
//   anything else     -> echo of the last user message
// Temperature is ignored.
class MockChatBackend : public ChatBackend {
 public:
  ChatResponse Chat(const ChatRequest& req) const override;
  std::string Identity() const override { return "mock:chat"; }
};

// r = |content(h) ∩ content(p)| / |content(h)| over lowercased tokens minus
// stopwords; p_ent = r, p_con = 0.1 (1 - r), p_neu the remainder.
// A hypothesis with no content tokens gets r = 0.
class MockNliBackend : public NliBackend {
 public:
  NliVerdict Nli(std::string_view premise,
                 std::string_view hypothesis) const override;
  std::string Identity() const override { return "mock:nli"; }
};

// Hashed bag of content tokens (FNV-1a mod dim), L2-normalised. Falls back
// to all tokens when the text is only stopwords.
class MockEmbedBackend : public EmbedBackend {
 public:
  static constexpr size_t kDefaultDim = 256;

  explicit MockEmbedBackend(size_t dim = kDefaultDim);
  EmbeddingVector Embed(std::string_view text) const override;
  std::string Identity() const override;
  size_t dim() const { return dim_; }

 private:
  size_t dim_;
};

// First sentence of the document, capped at 40 words.
std::string MockSummary(std::string_view document);

// n questions cycling over the document's sentences. Each names the first
// two thirds (rounded up) of the sentence's content tokens; the phrasing
// rotates so repeated sentences still give distinct questions.
std::vector<std::string> MockQuestions(std::string_view document, size_t n);

// Swaps function words through a fixed synonym table (chosen by seed parity)
// and leaves every content token untouched.
std::string MockParaphrase(std::string_view query, int64_t seed);

// "Yes" for long, fact-dense queries (>= 8 content tokens), else "No".
std::string MockDetectorReply(std::string_view query);

}  // namespace menta

#endif  // MENTA_MOCK_BACKENDS_H_
