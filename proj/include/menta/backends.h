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

// Client-side interfaces to the three model capabilities the toolkit needs:
// chat completion, 3-way NLI and text embedding. Every interface has an HTTP
// implementation (http_backends.h) and a deterministic mock
// (mock_backends.h). All implementations are safe to share between threads.

#ifndef MENTA_BACKENDS_H_
#define MENTA_BACKENDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace menta {

enum class Role { kSystem, kUser };

std::string_view RoleName(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  int max_output_tokens = 100;
  double temperature = 0.0;
  std::optional<int64_t> seed;

  // At least one user message, max_output_tokens >= 1, temperature >= 0.
  void Validate() const;
  // Content of the last user message.
  const std::string& LastUser() const;
  // Content of the first system message, or empty.
  std::string_view System() const;
};

struct ChatResponse {
  std::string text;
  int input_tokens = 0;
  int output_tokens = 0;
};

struct NliVerdict {
  double p_ent = 0.0;
  double p_neu = 1.0;
  double p_con = 0.0;

  // Strict rule: p_ent > max(p_neu, p_con). A three-way tie is not entailed.
  bool Entailed() const;
};

inline constexpr double kSimplexTolerance = 1e-6;

// Throws kInvalidArgument unless every component is in [0, 1] and the sum is
// 1 within kSimplexTolerance.
void ValidateVerdict(const NliVerdict& v);

struct EmbeddingVector {
  std::vector<double> values;
  size_t dim() const { return values.size(); }
};

double Dot(const EmbeddingVector& a, const EmbeddingVector& b);
double Cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // The returned text never exceeds req.max_output_tokens.
  virtual ChatResponse Chat(const ChatRequest& req) const = 0;
  // Recorded in run manifests, e.g. "mock:chat" or an URL. Never a key.
  virtual std::string Identity() const = 0;
};

class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual NliVerdict Nli(std::string_view premise,
                         std::string_view hypothesis) const = 0;
  // Element i equals Nli(premise, hypotheses[i]). The default validates
  // every input up front and then calls Nli() per hypothesis.
  virtual std::vector<NliVerdict> NliBatch(
      std::string_view premise,
      const std::vector<std::string>& hypotheses) const;
  virtual std::string Identity() const = 0;
};

class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual EmbeddingVector Embed(std::string_view text) const = 0;
  virtual std::string Identity() const = 0;
};

// Input validation shared by all NLI implementations. `index` is reported in
// the error message when set.
void ValidateNliInput(std::string_view premise, std::string_view hypothesis,
                      std::optional<size_t> index = std::nullopt);

}  // namespace menta

#endif  // MENTA_BACKENDS_H_
