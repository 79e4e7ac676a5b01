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

#include "menta/http_backends.h"

#include <cstdlib>
#include <mutex>
#include <regex>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "menta/error.h"
#include "menta/text.h"

namespace menta {
namespace {

using nlohmann::json;

constexpr size_t kBodyExcerpt = 200;

bool RetryableStatus(int status) { return status == 429 || status >= 500; }

template <typename T>
T Field(const json& j, const char* key, const char* route) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string(route) + " response: " + e.what());
  }
}

}  // namespace

struct HttpJsonClient::State {
  explicit State(int limit) : in_flight(limit) {}
  std::counting_semaphore<1024> in_flight;
};

HttpBackendConfig HttpBackendConfig::FromEnv(const char* url_env) {
  const char* url = std::getenv(url_env);
  if (url == nullptr || *url == '\0') {
    throw Error::Transport(std::string(url_env) +
                               " is not set; no backend to reach (use --mock "
                               "for offline runs)",
                           0);
  }
  HttpBackendConfig config;
  config.base_url = url;
  if (const char* key = std::getenv("MENTA_API_KEY"); key && *key) {
    config.api_key = key;
  }
  return config;
}

HttpJsonClient::HttpJsonClient(HttpBackendConfig config)
    : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, kUrl)) {
    throw Error(ErrorCode::kConfiguration,
                "invalid backend URL '" + config_.base_url + "'");
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
  if (config_.retry.max_attempts < 1) config_.retry.max_attempts = 1;
  const int limit = std::clamp(config_.max_in_flight, 1, 1024);
  state_ = std::make_unique<State>(limit);
}

HttpJsonClient::~HttpJsonClient() = default;

json HttpJsonClient::Post(const std::string& route, const json& body) const {
  const std::string path = path_prefix_ + route;
  const std::string payload = body.dump();
  auto backoff = config_.retry.initial_backoff;
  std::string last_problem;
  int last_status = 0;

  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    httplib::Result res;
    {
      state_->in_flight.acquire();
      httplib::Client cli(scheme_host_port_);
      cli.set_connection_timeout(config_.connect_timeout.count());
      cli.set_read_timeout(config_.read_timeout.count());
      if (config_.api_key) cli.set_bearer_token_auth(*config_.api_key);
      res = cli.Post(path, payload, "application/json");
      state_->in_flight.release();
    }

    if (!res) {
      last_problem = "transport failure: " + httplib::to_string(res.error());
      last_status = 0;
    } else if (res->status >= 200 && res->status < 300) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kParse,
                    route + " response is not JSON: " + e.what());
      }
    } else if (RetryableStatus(res->status)) {
      last_problem = "HTTP " + std::to_string(res->status);
      last_status = res->status;
    } else {
      throw Error::Backend(res->status, res->body.substr(0, kBodyExcerpt));
    }

    if (attempt < config_.retry.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error::Transport(
      "POST " + path + " failed after " +
          std::to_string(config_.retry.max_attempts) +
          " attempts (last: " + last_problem + ")",
      config_.retry.max_attempts, last_status);
}

ChatResponse HttpChatBackend::Chat(const ChatRequest& req) const {
  req.Validate();
  json body;
  body["messages"] = json::array();
  for (const auto& m : req.messages) {
    body["messages"].push_back(
        {{"role", std::string(RoleName(m.role))}, {"content", m.content}});
  }
  body["max_output_tokens"] = req.max_output_tokens;
  body["temperature"] = req.temperature;
  if (req.seed) body["seed"] = *req.seed;

  const json reply = client_.Post("/chat", body);
  ChatResponse out;
  out.text = Field<std::string>(reply, "text", "/chat");
  int input_chars = 0;
  for (const auto& m : req.messages) {
    input_chars += static_cast<int>(m.content.size());
  }
  out.input_tokens = reply.contains("input_tokens")
                         ? reply["input_tokens"].get<int>()
                         : (input_chars + 3) / 4;
  out.output_tokens = reply.contains("output_tokens")
                          ? reply["output_tokens"].get<int>()
                          : text::EstimateTokens(out.text);
  if (out.output_tokens > req.max_output_tokens) {
    out.text = text::TruncateToTokens(out.text, req.max_output_tokens);
    out.output_tokens = req.max_output_tokens;
  }
  return out;
}

std::string HttpChatBackend::Identity() const {
  return "http:" + client_.config().base_url;
}

NliVerdict HttpNliBackend::Nli(std::string_view premise,
                               std::string_view hypothesis) const {
  return NliBatch(premise, {std::string(hypothesis)}).front();
}

std::vector<NliVerdict> HttpNliBackend::NliBatch(
    std::string_view premise, const std::vector<std::string>& hypotheses) const {
  if (hypotheses.empty()) throw InvalidArgument("NLI batch is empty");
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    ValidateNliInput(premise, hypotheses[i],
                     hypotheses.size() > 1 ? std::optional<size_t>(i)
                                           : std::nullopt);
  }
  std::vector<NliVerdict> out;
  out.reserve(hypotheses.size());
  for (size_t start = 0; start < hypotheses.size(); start += kMaxBatch) {
    const size_t end = std::min(hypotheses.size(), start + kMaxBatch);
    json body;
    body["premise"] = std::string(premise);
    body["hypotheses"] = std::vector<std::string>(hypotheses.begin() + start,
                                                  hypotheses.begin() + end);
    const json reply = client_.Post("/nli", body);
    const auto verdicts = Field<json>(reply, "verdicts", "/nli");
    if (!verdicts.is_array() || verdicts.size() != end - start) {
      throw Error(ErrorCode::kParse, "/nli returned " +
                                         std::to_string(verdicts.size()) +
                                         " verdicts for " +
                                         std::to_string(end - start) +
                                         " hypotheses");
    }
    for (size_t i = 0; i < verdicts.size(); ++i) {
      NliVerdict v{Field<double>(verdicts[i], "ent", "/nli"),
                   Field<double>(verdicts[i], "neu", "/nli"),
                   Field<double>(verdicts[i], "con", "/nli")};
      try {
        ValidateVerdict(v);
      } catch (const Error& e) {
        throw e.WithContext("/nli verdict at index " +
                            std::to_string(start + i));
      }
      out.push_back(v);
    }
  }
  return out;
}

std::string HttpNliBackend::Identity() const {
  return "http:" + client_.config().base_url;
}

struct HttpEmbedBackend::DimState {
  std::mutex mu;
  size_t dim = 0;
};

HttpEmbedBackend::HttpEmbedBackend(HttpBackendConfig config)
    : client_(std::move(config)), dim_(std::make_unique<DimState>()) {}

HttpEmbedBackend::~HttpEmbedBackend() = default;

EmbeddingVector HttpEmbedBackend::Embed(std::string_view text) const {
  if (text.empty()) throw InvalidArgument("embed text is empty");
  json body;
  body["texts"] = {std::string(text)};
  const json reply = client_.Post("/embed", body);
  const auto vectors = Field<std::vector<std::vector<double>>>(
      reply, "vectors", "/embed");
  if (vectors.size() != 1 || vectors[0].empty()) {
    throw Error(ErrorCode::kParse, "/embed returned no vector");
  }
  const size_t reported = reply.value("dim", vectors[0].size());
  if (reported != vectors[0].size()) {
    throw InvalidArgument("/embed dim field disagrees with vector length");
  }
  {
    std::lock_guard lock(dim_->mu);
    if (dim_->dim == 0) {
      dim_->dim = reported;
    } else if (dim_->dim != reported) {
      throw InvalidArgument("/embed dim changed from " +
                            std::to_string(dim_->dim) + " to " +
                            std::to_string(reported));
    }
  }
  return EmbeddingVector{vectors[0]};
}

std::string HttpEmbedBackend::Identity() const {
  return "http:" + client_.config().base_url;
}

}  // namespace menta
