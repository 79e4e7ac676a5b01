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


// Query-time detectors a RAG operator could deploy against document-probing
// queries, and the recall / false-positive protocol used to evaluate them.

#ifndef MENTA_DETECTORS_H_
#define MENTA_DETECTORS_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "menta/backends.h"
#include "menta/retrieval.h"

namespace menta {

struct DetectorVerdict {
  bool flagged = false;
  double statistic = 0.0;
  std::optional<double> p_value;
  bool parse_warning = false;
};

// Gap between the top dense similarity and the next m, in units of their
// sample standard deviation:
//   z = (s1 - mean(s2..s_{m+1})) / std(s2..s_{m+1})
// p is the standard normal upper tail of z; flagged iff p < rho. A zero
// spread gives z = 0, p = 0.5 and no flag.
DetectorVerdict SimilaritySpikeDetect(std::string_view query,
                                      const RetrievalIndex& index,
                                      double rho = 0.05, size_t m = 10);

// Sends the classification prompt; flagged iff the case-folded reply starts
// with "yes". Replies starting with neither "yes" nor "no" are not flagged
// and carry parse_warning.
DetectorVerdict LlmDetect(std::string_view query, const ChatBackend& chat);

using Detector = std::function<DetectorVerdict(const std::string& query)>;

struct DetectorEvalResult {
  double recall_on_attacks = 0.0;
  double fpr_on_benign = 0.0;
  size_t n_attack = 0;
  size_t n_benign = 0;
  size_t n_warnings = 0;
};

DetectorEvalResult EvaluateDetector(const Detector& detector,
                                    const std::vector<std::string>& attack_queries,
                                    const std::vector<std::string>& benign_queries);

nlohmann::ordered_json DetectorResultToJson(const DetectorEvalResult& r);

enum class QueryLabel { kAttack, kBenign };

struct LabeledQuery {
  std::string query;
  QueryLabel label = QueryLabel::kBenign;
  std::string attack_name;
};

// JSONL {query, label: attack|benign, attack_name}.
std::vector<LabeledQuery> LoadDetectionSet(const std::filesystem::path& path);
void SaveDetectionSet(const std::filesystem::path& path,
                      const std::vector<LabeledQuery>& queries);

}  // namespace menta

#endif  // MENTA_DETECTORS_H_
