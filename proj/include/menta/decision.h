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


// Threshold calibration and the Bernoulli count-statistic test behind the
// membership decision, plus Wald's sequential-test estimate of how many
// queries a given hit-rate gap needs.

#ifndef MENTA_DECISION_H_
#define MENTA_DECISION_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "menta/corpus.h"

namespace menta {

// p1: per-query hit rate for members, p0: for non-members.
struct BernoulliHypotheses {
  double p1 = 0.0;
  double p0 = 0.0;

  // Requires 0 < p0 < p1 < 1.
  void Validate() const;
};

// log of the likelihood ratio of S hits in n queries:
//   S ln(p1/p0) + (n - S) ln((1 - p1)/(1 - p0))
double NpLogLr(int s, int n, const BernoulliHypotheses& hyp);

// Member iff s > tau_s.
Membership NpDecide(int s, int n, const BernoulliHypotheses& hyp, int tau_s);

// Log-LR threshold equivalent to the count threshold tau_s: the value half
// way between the log-LR at tau_s and at tau_s + 1. Thresholding the log-LR
// strictly above it gives the same decision as s > tau_s.
double NpLogLrThreshold(int tau_s, int n, const BernoulliHypotheses& hyp);

// KL(Bern(p1) || Bern(p0)); both arguments in (0, 1).
double KlBernoulli(double p1, double p0);

// Wald's approximation of the expected sample size under H1 for error rates
// alpha, beta in (0, 0.5). Throws kDivergence when the KL is zero.
double ExpectedBudget(const BernoulliHypotheses& hyp, double alpha,
                      double beta);

struct ThresholdCalibration {
  double tau = 0.0;  // may be -inf or +inf
  std::string objective = "balanced_accuracy";
  double balanced_accuracy = 0.0;
  size_t n_member = 0;
  size_t n_non_member = 0;

  Membership Decide(double score) const {
    return score > tau ? Membership::kMember : Membership::kNonMember;
  }
};

// Candidates are -inf, the midpoints between adjacent distinct scores, and
// +inf. Picks the highest balanced accuracy; ties go to the smallest tau.
ThresholdCalibration CalibrateThreshold(const std::vector<double>& member_scores,
                                        const std::vector<double>& non_member_scores);

// Infinite thresholds are written as the strings "inf" / "-inf".
nlohmann::ordered_json CalibrationToJson(const ThresholdCalibration& c);
ThresholdCalibration CalibrationFromJson(const nlohmann::json& j);

}  // namespace menta

#endif  // MENTA_DECISION_H_
