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


// Population metrics for membership scores: ROC AUC, accuracy at the best
// threshold, TPR at fixed FPR on the empirical (step) ROC, and histogram
// export. Decision rule everywhere is "member iff score > threshold".

#ifndef MENTA_METRICS_H_
#define MENTA_METRICS_H_

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

namespace menta {

struct ScoredPopulation {
  std::vector<double> member_scores;
  std::vector<double> non_member_scores;

  void Validate() const;  // both non-empty, all finite
};

inline constexpr std::array<double, 3> kTprFprTargets = {0.005, 0.01, 0.05};

struct MetricsRow {
  double auc = 0.0;
  double accuracy = 0.0;
  std::array<double, 3> tpr_at{};  // aligned with kTprFprTargets
};

// Mann-Whitney: pairs with member > non-member count 1, ties 0.5.
double Auc(const ScoredPopulation& pop);

// max over thresholds of (TP + TN) / (P + N).
double BestAccuracy(const ScoredPopulation& pop);

// Largest TPR over thresholds whose FPR <= fpr_target. No interpolation.
double TprAtFpr(const ScoredPopulation& pop, double fpr_target);

MetricsRow ComputeMetrics(const ScoredPopulation& pop);

nlohmann::ordered_json MetricsToJson(const MetricsRow& row);
MetricsRow MetricsFromJson(const nlohmann::json& j);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  size_t member_count = 0;
  size_t non_member_count = 0;
};

inline constexpr size_t kHistogramBins = 40;

// Uniform bins over [-1, 1]; the top edge falls into the last bin.
std::vector<HistogramBin> ScoreHistogram(const ScoredPopulation& pop,
                                         size_t bins = kHistogramBins);

// CSV with header bin_low,bin_high,member_count,non_member_count.
std::string HistogramCsv(const std::vector<HistogramBin>& bins);

}  // namespace menta

#endif  // MENTA_METRICS_H_
