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


#include "menta/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "menta/error.h"

namespace menta {

using nlohmann::json;
using nlohmann::ordered_json;

void ScoredPopulation::Validate() const {
  if (member_scores.empty() || non_member_scores.empty()) {
    throw InvalidArgument("metrics need member and non-member scores");
  }
  for (const auto* list : {&member_scores, &non_member_scores}) {
    for (double s : *list) {
      if (!std::isfinite(s)) throw InvalidArgument("scores must be finite");
    }
  }
}

namespace {

struct Sorted {
  std::vector<double> pos;
  std::vector<double> neg;
  std::vector<double> thresholds;  // -inf then every distinct score

  explicit Sorted(const ScoredPopulation& pop)
      : pos(pop.member_scores), neg(pop.non_member_scores) {
    pop.Validate();
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    thresholds = pos;
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());
    thresholds.insert(thresholds.begin(),
                      -std::numeric_limits<double>::infinity());
  }

  static long long Above(const std::vector<double>& v, double tau) {
    return v.end() - std::upper_bound(v.begin(), v.end(), tau);
  }
};

}  // namespace

double Auc(const ScoredPopulation& pop) {
  const Sorted s(pop);
  // Twice the Mann-Whitney U, kept integral.
  long long twice_u = 0;
  for (double x : s.pos) {
    const auto lo = std::lower_bound(s.neg.begin(), s.neg.end(), x);
    const auto hi = std::upper_bound(lo, s.neg.end(), x);
    twice_u += 2 * (lo - s.neg.begin()) + (hi - lo);
  }
  const double pairs =
      static_cast<double>(s.pos.size()) * static_cast<double>(s.neg.size());
  return (static_cast<double>(twice_u) / 2.0) / pairs;
}

double BestAccuracy(const ScoredPopulation& pop) {
  const Sorted s(pop);
  const auto n = static_cast<long long>(s.neg.size());
  long long best = 0;
  for (double tau : s.thresholds) {
    const long long correct =
        Sorted::Above(s.pos, tau) + (n - Sorted::Above(s.neg, tau));
    best = std::max(best, correct);
  }
  return static_cast<double>(best) /
         static_cast<double>(s.pos.size() + s.neg.size());
}

double TprAtFpr(const ScoredPopulation& pop, double fpr_target) {
  if (!(fpr_target >= 0.0 && fpr_target <= 1.0)) {
    throw InvalidArgument("fpr target must be in [0, 1]");
  }
  const Sorted s(pop);
  const double n_pos = static_cast<double>(s.pos.size());
  const double n_neg = static_cast<double>(s.neg.size());
  // The largest score always gives FPR 0, so some threshold qualifies.
  double best = 0.0;
  for (double tau : s.thresholds) {
    const double fpr = static_cast<double>(Sorted::Above(s.neg, tau)) / n_neg;
    if (fpr > fpr_target) continue;
    best = std::max(best, static_cast<double>(Sorted::Above(s.pos, tau)) / n_pos);
  }
  return best;
}

MetricsRow ComputeMetrics(const ScoredPopulation& pop) {
  MetricsRow row;
  row.auc = Auc(pop);
  row.accuracy = BestAccuracy(pop);
  for (size_t i = 0; i < kTprFprTargets.size(); ++i) {
    row.tpr_at[i] = TprAtFpr(pop, kTprFprTargets[i]);
  }
  return row;
}

ordered_json MetricsToJson(const MetricsRow& row) {
  ordered_json j;
  j["auc"] = row.auc;
  j["accuracy"] = row.accuracy;
  ordered_json tpr;
  for (size_t i = 0; i < kTprFprTargets.size(); ++i) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", kTprFprTargets[i]);
    tpr[key] = row.tpr_at[i];
  }
  j["tpr_at_fpr"] = std::move(tpr);
  return j;
}

MetricsRow MetricsFromJson(const json& j) {
  MetricsRow row;
  row.auc = j.at("auc").get<double>();
  row.accuracy = j.at("accuracy").get<double>();
  for (size_t i = 0; i < kTprFprTargets.size(); ++i) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", kTprFprTargets[i]);
    row.tpr_at[i] = j.at("tpr_at_fpr").at(key).get<double>();
  }
  return row;
}

std::vector<HistogramBin> ScoreHistogram(const ScoredPopulation& pop,
                                         size_t bins) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
  std::vector<HistogramBin> out(bins);
  const double nb = static_cast<double>(bins);
  const double width = 2.0 / nb;
  for (size_t i = 0; i < bins; ++i) {
    out[i].low = (2.0 * static_cast<double>(i) - nb) / nb;
    out[i].high = (2.0 * static_cast<double>(i + 1) - nb) / nb;
  }
  auto bin_of = [&](double s) {
    if (s < -1.0 || s > 1.0) throw InvalidArgument("score outside [-1, 1]");
    const auto i = static_cast<size_t>((s + 1.0) / width);
    return std::min(i, bins - 1);
  };
  for (double s : pop.member_scores) ++out[bin_of(s)].member_count;
  for (double s : pop.non_member_scores) ++out[bin_of(s)].non_member_count;
  return out;
}

std::string HistogramCsv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_low,bin_high,member_count,non_member_count\n";
  char line[128];
  for (const auto& b : bins) {
    std::snprintf(line, sizeof(line), "%.4f,%.4f,%zu,%zu\n", b.low, b.high,
                  b.member_count, b.non_member_count);
    out += line;
  }
  return out;
}

}  // namespace menta
