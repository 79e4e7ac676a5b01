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


#include "menta/detectors.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "menta/error.h"
#include "menta/io.h"
#include "menta/prompts.h"
#include "menta/text.h"

namespace menta {

using nlohmann::json;
using nlohmann::ordered_json;

DetectorVerdict SimilaritySpikeDetect(std::string_view query,
                                      const RetrievalIndex& index, double rho,
                                      size_t m) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("rho must be in [0, 1]");
  if (m < 2) throw InvalidArgument("comparison band m must be >= 2");
  if (index.kind() != RetrieverKind::kDense) {
    throw Error(ErrorCode::kConfiguration, "spike detector needs a dense index");
  }
  if (index.size() < m + 1) {
    throw InvalidArgument("spike detector needs at least " +
                          std::to_string(m + 1) + " indexed documents, have " +
                          std::to_string(index.size()));
  }
  std::vector<double> sims = index.ScoreAll(query);
  std::partial_sort(sims.begin(), sims.begin() + static_cast<long>(m + 1),
                    sims.end(), std::greater<>());
  double mean = 0.0;
  for (size_t i = 1; i <= m; ++i) mean += sims[i];
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (size_t i = 1; i <= m; ++i) ss += (sims[i] - mean) * (sims[i] - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));

  DetectorVerdict v;
  if (!(sd > 1e-12)) {
    v.statistic = 0.0;
    v.p_value = 0.5;
    return v;
  }
  v.statistic = (sims[0] - mean) / sd;
  v.p_value = 0.5 * std::erfc(v.statistic / std::sqrt(2.0));
  v.flagged = *v.p_value < rho;
  return v;
}

DetectorVerdict LlmDetect(std::string_view query, const ChatBackend& chat) {
  ChatRequest req;
  req.messages = {{Role::kUser, prompts::Render(prompts::LlmDetector(),
                                                {{"query", std::string(query)}})}};
  req.max_output_tokens = 5;
  const std::string reply = text::ToLower(text::Trim(chat.Chat(req).text));
  DetectorVerdict v;
  if (reply.starts_with("yes")) {
    v.flagged = true;
    v.statistic = 1.0;
  } else if (!reply.starts_with("no")) {
    v.parse_warning = true;
  }
  return v;
}

DetectorEvalResult EvaluateDetector(const Detector& detector,
                                    const std::vector<std::string>& attack_queries,
                                    const std::vector<std::string>& benign_queries) {
  if (attack_queries.empty() || benign_queries.empty()) {
    throw InvalidArgument("detector evaluation needs attack and benign queries");
  }
  DetectorEvalResult r;
  r.n_attack = attack_queries.size();
  r.n_benign = benign_queries.size();
  size_t hits = 0;
  for (const auto& q : attack_queries) {
    const auto v = detector(q);
    hits += v.flagged;
    r.n_warnings += v.parse_warning;
  }
  size_t false_alarms = 0;
  for (const auto& q : benign_queries) {
    const auto v = detector(q);
    false_alarms += v.flagged;
    r.n_warnings += v.parse_warning;
  }
  r.recall_on_attacks = static_cast<double>(hits) / static_cast<double>(r.n_attack);
  r.fpr_on_benign =
      static_cast<double>(false_alarms) / static_cast<double>(r.n_benign);
  return r;
}

ordered_json DetectorResultToJson(const DetectorEvalResult& r) {
  ordered_json j;
  j["recall_on_attacks"] = r.recall_on_attacks;
  j["fpr_on_benign"] = r.fpr_on_benign;
  j["n_attack"] = r.n_attack;
  j["n_benign"] = r.n_benign;
  j["n_warnings"] = r.n_warnings;
  return j;
}

std::vector<LabeledQuery> LoadDetectionSet(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open detection set " + path.string());
  std::vector<LabeledQuery> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      LabeledQuery q;
      q.query = j.at("query").get<std::string>();
      const auto label = j.at("label").get<std::string>();
      if (label == "attack") {
        q.label = QueryLabel::kAttack;
      } else if (label == "benign") {
        q.label = QueryLabel::kBenign;
      } else {
        throw InvalidArgument("label must be attack or benign");
      }
      q.attack_name = j.value("attack_name", "");
      out.push_back(std::move(q));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + " line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
  }
  return out;
}

void SaveDetectionSet(const std::filesystem::path& path,
                      const std::vector<LabeledQuery>& queries) {
  std::ostringstream out;
  for (const auto& q : queries) {
    ordered_json j;
    j["query"] = q.query;
    j["label"] = q.label == QueryLabel::kAttack ? "attack" : "benign";
    j["attack_name"] = q.attack_name;
    out << j.dump() << '\n';
  }
  io::WriteFileAtomic(path, out.str());
}

}  // namespace menta
