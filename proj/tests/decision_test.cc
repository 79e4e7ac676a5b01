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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "menta/error.h"
#include "menta/rng.h"

namespace menta {
namespace {

const BernoulliHypotheses kHyp{0.8, 0.2};

TEST(NpLogLrTest, HandValue) {
  // 4 ln 4 + ln(1/4) = 3 ln 4.
  EXPECT_NEAR(NpLogLr(4, 5, kHyp), 3.0 * std::log(4.0), 1e-12);
  EXPECT_NEAR(NpLogLr(4, 5, kHyp), 4.1589, 1e-4);
  EXPECT_EQ(NpLogLr(0, 0, kHyp), 0.0);
}

TEST(NpLogLrTest, Validation) {
  EXPECT_THROW(NpLogLr(1, 2, {0.2, 0.8}), Error);
  EXPECT_THROW(NpLogLr(1, 2, {1.0, 0.2}), Error);
  EXPECT_THROW(NpLogLr(3, 2, kHyp), Error);
  EXPECT_THROW(NpLogLr(-1, 2, kHyp), Error);
}

TEST(NpDecideTest, StrictThreshold) {
  EXPECT_EQ(NpDecide(3, 5, kHyp, 2), Membership::kMember);
  EXPECT_EQ(NpDecide(2, 5, kHyp, 2), Membership::kNonMember);
}

TEST(NpDecideTest, CountAndLikelihoodRatioRulesAgree) {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    double a = 0.01 + 0.98 * rng.Uniform01();
    double b = 0.01 + 0.98 * rng.Uniform01();
    if (a == b) continue;
    const BernoulliHypotheses h{std::max(a, b), std::min(a, b)};
    for (int n = 0; n <= 20; ++n) {
      for (int tau = -1; tau <= n; ++tau) {
        const double lr_tau = NpLogLrThreshold(tau, n, h);
        for (int s = 0; s <= n; ++s) {
          const bool by_count = NpDecide(s, n, h, tau) == Membership::kMember;
          EXPECT_EQ(by_count, NpLogLr(s, n, h) > lr_tau);
        }
      }
    }
  }
}

TEST(KlTest, Values) {
  EXPECT_EQ(KlBernoulli(0.3, 0.3), 0.0);
  EXPECT_NEAR(KlBernoulli(0.8, 0.2), 0.8 * std::log(4.0) + 0.2 * std::log(0.25), 1e-15);
  EXPECT_NEAR(KlBernoulli(0.8, 0.2), 0.8318, 1e-4);
  EXPECT_THROW(KlBernoulli(0.0, 0.5), Error);
}

TEST(ExpectedBudgetTest, HandValue) {
  const double num = 0.95 * std::log(19.0) + 0.05 * std::log(1.0 / 19.0);
  EXPECT_NEAR(ExpectedBudget(kHyp, 0.05, 0.05), num / KlBernoulli(0.8, 0.2), 1e-12);
  EXPECT_NEAR(ExpectedBudget(kHyp, 0.05, 0.05), 3.19, 0.01);
}

TEST(ExpectedBudgetTest, LargerDivergenceNeedsFewerQueries) {
  EXPECT_LT(ExpectedBudget({0.9, 0.1}, 0.05, 0.05), ExpectedBudget({0.7, 0.3}, 0.05, 0.05));
  EXPECT_THROW(ExpectedBudget(kHyp, 0.0, 0.05), Error);
  EXPECT_THROW(ExpectedBudget(kHyp, 0.05, 0.6), Error);
}

TEST(ExpectedBudgetTest, SymmetricUnderComplement) {
  for (auto [p1, p0] : {std::pair{0.8, 0.2}, {0.6, 0.1}, {0.95, 0.5}}) {
    const double a = ExpectedBudget({p1, p0}, 0.05, 0.05);
    const double b = ExpectedBudget({1.0 - p0, 1.0 - p1}, 0.05, 0.05);
    // KL(p1||p0) equals KL(1-p1||1-p0) by relabeling outcomes.
    EXPECT_NEAR(KlBernoulli(p1, p0), KlBernoulli(1.0 - p1, 1.0 - p0), 1e-12);
    EXPECT_GT(a, 0.0);
    EXPECT_GT(b, 0.0);
  }
}

TEST(CalibrateTest, MidpointOfPerfectGap) {
  const auto c = CalibrateThreshold({0.8, 0.6}, {0.2, -0.4});
  EXPECT_DOUBLE_EQ(c.tau, 0.4);
  EXPECT_DOUBLE_EQ(c.balanced_accuracy, 1.0);
  EXPECT_EQ(c.Decide(0.5), Membership::kMember);
  EXPECT_EQ(c.Decide(0.4), Membership::kNonMember);
}

TEST(CalibrateTest, TiesAndNoSignal) {
  const auto tie = CalibrateThreshold({0.5}, {0.5});
  EXPECT_DOUBLE_EQ(tie.balanced_accuracy, 0.5);
  EXPECT_EQ(tie.tau, -std::numeric_limits<double>::infinity());
  const auto same = CalibrateThreshold({0.1, 0.3}, {0.1, 0.3});
  EXPECT_DOUBLE_EQ(same.balanced_accuracy, 0.5);
  EXPECT_EQ(CalibrateThreshold({0.1, 0.3}, {0.1, 0.3}).tau, same.tau);
  EXPECT_THROW(CalibrateThreshold({}, {0.1}), Error);
}

TEST(CalibrateTest, BalancesUnequalClasses) {
  // Accuracy would favor tau = +inf; balanced accuracy picks the gap.
  const auto c = CalibrateThreshold({0.9}, {0.1, 0.2, 0.3, 0.95});
  EXPECT_DOUBLE_EQ(c.tau, 0.6);
  EXPECT_DOUBLE_EQ(c.balanced_accuracy, (1.0 + 0.75) / 2.0);
}

TEST(CalibrateTest, JsonRoundTripIncludingInfinity) {
  for (const auto& c : {CalibrateThreshold({0.8}, {0.2}), CalibrateThreshold({0.5}, {0.5})}) {
    const auto back = CalibrationFromJson(CalibrationToJson(c));
    EXPECT_EQ(back.tau, c.tau);
    EXPECT_EQ(back.n_member, c.n_member);
  }
  EXPECT_EQ(CalibrationToJson(CalibrateThreshold({0.5}, {0.5}))["tau"], "-inf");
}

}  // namespace
}  // namespace menta
