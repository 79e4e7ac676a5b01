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


#include "menta/decision.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "menta/error.h"

namespace menta {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool OpenUnit(double p) { return p > 0.0 && p < 1.0; }

void CheckCounts(int s, int n) {
  if (n < 0 || s < 0 || s > n) {
    throw InvalidArgument("need 0 <= S <= n, got S=" + std::to_string(s) +
                          " n=" + std::to_string(n));
  }
}

}  // namespace

void BernoulliHypotheses::Validate() const {
  if (!OpenUnit(p0) || !OpenUnit(p1) || !(p0 < p1)) {
    throw InvalidArgument("hypotheses need 0 < p0 < p1 < 1");
  }
}

double NpLogLr(int s, int n, const BernoulliHypotheses& hyp) {
  hyp.Validate();
  CheckCounts(s, n);
  return s * std::log(hyp.p1 / hyp.p0) +
         (n - s) * std::log((1.0 - hyp.p1) / (1.0 - hyp.p0));
}

Membership NpDecide(int s, int n, const BernoulliHypotheses& hyp, int tau_s) {
  hyp.Validate();
  CheckCounts(s, n);
  return s > tau_s ? Membership::kMember : Membership::kNonMember;
}

double NpLogLrThreshold(int tau_s, int n, const BernoulliHypotheses& hyp) {
  hyp.Validate();
  if (n < 0) throw InvalidArgument("n must be >= 0");
  // Affine in S, so evaluate the line at tau_s + 1/2.
  const double slope =
      std::log(hyp.p1 / hyp.p0) - std::log((1.0 - hyp.p1) / (1.0 - hyp.p0));
  const double intercept = n * std::log((1.0 - hyp.p1) / (1.0 - hyp.p0));
  return intercept + slope * (tau_s + 0.5);
}

double KlBernoulli(double p1, double p0) {
  if (!OpenUnit(p1) || !OpenUnit(p0)) {
    throw InvalidArgument("KL needs probabilities in (0, 1)");
  }
  return p1 * std::log(p1 / p0) + (1.0 - p1) * std::log((1.0 - p1) / (1.0 - p0));
}

double ExpectedBudget(const BernoulliHypotheses& hyp, double alpha,
                      double beta) {
  if (!(alpha > 0.0 && alpha < 0.5) || !(beta > 0.0 && beta < 0.5)) {
    throw InvalidArgument("alpha and beta must be in (0, 0.5)");
  }
  const double kl = KlBernoulli(hyp.p1, hyp.p0);
  if (!(kl > 0.0)) {
    throw Error(ErrorCode::kDivergence, "KL divergence is zero");
  }
  const double num = (1.0 - beta) * std::log((1.0 - beta) / alpha) +
                     beta * std::log(beta / (1.0 - alpha));
  return num / kl;
}

ThresholdCalibration CalibrateThreshold(
    const std::vector<double>& member_scores,
    const std::vector<double>& non_member_scores) {
  if (member_scores.empty() || non_member_scores.empty()) {
    throw InvalidArgument("calibration needs member and non-member scores");
  }
  std::vector<double> values = member_scores;
  values.insert(values.end(), non_member_scores.begin(),
                non_member_scores.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> candidates = {-kInf};
  for (size_t i = 0; i + 1 < values.size(); ++i) {
    candidates.push_back((values[i] + values[i + 1]) / 2.0);
  }
  candidates.push_back(kInf);

  std::vector<double> pos = member_scores;
  std::vector<double> neg = non_member_scores;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const auto p = static_cast<long long>(pos.size());
  const auto n = static_cast<long long>(neg.size());

  // Balanced accuracy scaled by 2PN stays integral: tp*N + tn*P.
  long long best = -1;
  double best_tau = -kInf;
  for (double tau : candidates) {
    const long long tp =
        pos.end() - std::upper_bound(pos.begin(), pos.end(), tau);
    const long long tn = std::upper_bound(neg.begin(), neg.end(), tau) - neg.begin();
    const long long objective = tp * n + tn * p;
    if (objective > best) {
      best = objective;
      best_tau = tau;
    }
  }
  ThresholdCalibration c;
  c.tau = best_tau;
  c.balanced_accuracy =
      static_cast<double>(best) / static_cast<double>(2 * p * n);
  c.n_member = pos.size();
  c.n_non_member = neg.size();
  return c;
}

ordered_json CalibrationToJson(const ThresholdCalibration& c) {
  ordered_json j;
  if (std::isinf(c.tau)) {
    j["tau"] = c.tau > 0 ? "inf" : "-inf";
  } else {
    j["tau"] = c.tau;
  }
  j["objective"] = c.objective;
  j["balanced_accuracy"] = c.balanced_accuracy;
  j["n_member"] = c.n_member;
  j["n_non_member"] = c.n_non_member;
  return j;
}

ThresholdCalibration CalibrationFromJson(const json& j) {
  ThresholdCalibration c;
  const auto& tau = j.at("tau");
  if (tau.is_string()) {
    const auto s = tau.get<std::string>();
    if (s == "inf") {
      c.tau = std::numeric_limits<double>::infinity();
    } else if (s == "-inf") {
      c.tau = -std::numeric_limits<double>::infinity();
    } else {
      throw Error(ErrorCode::kParse, "bad tau '" + s + "'");
    }
  } else {
    c.tau = tau.get<double>();
  }
  c.objective = j.value("objective", "balanced_accuracy");
  c.balanced_accuracy = j.value("balanced_accuracy", 0.0);
  c.n_member = j.at("n_member").get<size_t>();
  c.n_non_member = j.at("n_non_member").get<size_t>();
  return c;
}

}  // namespace menta
