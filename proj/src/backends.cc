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

#include "menta/backends.h"

#include <algorithm>
#include <cmath>

#include "menta/error.h"

namespace menta {

std::string_view RoleName(Role role) {
  return role == Role::kSystem ? "system" : "user";
}

void ChatRequest::Validate() const {
  const bool has_user =
      std::any_of(messages.begin(), messages.end(),
                  [](const ChatMessage& m) { return m.role == Role::kUser; });
  if (!has_user) throw InvalidArgument("chat request has no user message");
  if (max_output_tokens < 1) {
    throw InvalidArgument("max_output_tokens must be >= 1");
  }
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
}

const std::string& ChatRequest::LastUser() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::kUser) return it->content;
  }
  throw InvalidArgument("chat request has no user message");
}

std::string_view ChatRequest::System() const {
  for (const auto& m : messages) {
    if (m.role == Role::kSystem) return m.content;
  }
  return {};
}

bool NliVerdict::Entailed() const { return p_ent > std::max(p_neu, p_con); }

void ValidateVerdict(const NliVerdict& v) {
  for (double p : {v.p_ent, v.p_neu, v.p_con}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("NLI probability outside [0, 1]");
    }
  }
  const double sum = v.p_ent + v.p_neu + v.p_con;
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw InvalidArgument("NLI verdict does not sum to 1 (sum=" +
                          std::to_string(sum) + ")");
  }
}

double Dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("embedding dim mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.dim(); ++i) s += a.values[i] * b.values[i];
  return s;
}

double Cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  const double na = std::sqrt(Dot(a, a));
  const double nb = std::sqrt(Dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return Dot(a, b) / (na * nb);
}

void ValidateNliInput(std::string_view premise, std::string_view hypothesis,
                      std::optional<size_t> index) {
  const std::string where =
      index ? "hypothesis at index " + std::to_string(*index) : "hypothesis";
  if (premise.empty()) throw InvalidArgument("NLI premise is empty");
  if (hypothesis.empty()) throw InvalidArgument(where + " is empty");
}

std::vector<NliVerdict> NliBackend::NliBatch(
    std::string_view premise, const std::vector<std::string>& hypotheses) const {
  if (hypotheses.empty()) throw InvalidArgument("NLI batch is empty");
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    ValidateNliInput(premise, hypotheses[i], i);
  }
  std::vector<NliVerdict> out;
  out.reserve(hypotheses.size());
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    try {
      out.push_back(Nli(premise, hypotheses[i]));
    } catch (const Error& e) {
      throw e.WithContext("hypothesis at index " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace menta
