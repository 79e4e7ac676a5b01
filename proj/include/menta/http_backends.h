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

// JSON-over-HTTP model backends.
//
//   POST {base}/chat   {messages:[{role,content}], max_output_tokens,
//                       temperature, seed?} -> {text, input_tokens,
//                       output_tokens}
//   POST {base}/nli    {premise, hypotheses:[..]} -> {verdicts:[{ent,neu,con}]}
//   POST {base}/embed  {texts:[..]} -> {vectors:[[..]], dim}
//
// MENTA_API_KEY, when set, is sent as a bearer token.

#ifndef MENTA_HTTP_BACKENDS_H_
#define MENTA_HTTP_BACKENDS_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "menta/backends.h"

namespace menta {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
};

struct HttpBackendConfig {
  std::string base_url;
  std::optional<std::string> api_key;
  RetryPolicy retry;
  int max_in_flight = 4;
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{120};

  // base_url from `url_env` (e.g. MENTA_CHAT_URL), key from MENTA_API_KEY.
  // Throws kTransport when the URL variable is unset: without a URL the
  // backend is unreachable.
  static HttpBackendConfig FromEnv(const char* url_env);
};

// POSTs JSON with retries on transport errors, 429 and 5xx (exponential
// backoff), bounding in-flight requests.
class HttpJsonClient {
 public:
  explicit HttpJsonClient(HttpBackendConfig config);
  ~HttpJsonClient();

  nlohmann::json Post(const std::string& route,
                      const nlohmann::json& body) const;

  const HttpBackendConfig& config() const { return config_; }

 private:
  struct State;
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::unique_ptr<State> state_;
};

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config)
      : client_(std::move(config)) {}
  ChatResponse Chat(const ChatRequest& req) const override;
  std::string Identity() const override;

 private:
  HttpJsonClient client_;
};

class HttpNliBackend : public NliBackend {
 public:
  // Hypotheses per request; larger batches are split client-side.
  static constexpr size_t kMaxBatch = 64;

  explicit HttpNliBackend(HttpBackendConfig config)
      : client_(std::move(config)) {}
  NliVerdict Nli(std::string_view premise,
                 std::string_view hypothesis) const override;
  std::vector<NliVerdict> NliBatch(
      std::string_view premise,
      const std::vector<std::string>& hypotheses) const override;
  std::string Identity() const override;

 private:
  HttpJsonClient client_;
};

class HttpEmbedBackend : public EmbedBackend {
 public:
  explicit HttpEmbedBackend(HttpBackendConfig config);
  ~HttpEmbedBackend() override;
  EmbeddingVector Embed(std::string_view text) const override;
  std::string Identity() const override;

 private:
  struct DimState;
  HttpJsonClient client_;
  std::unique_ptr<DimState> dim_;
};

}  // namespace menta

#endif  // MENTA_HTTP_BACKENDS_H_
