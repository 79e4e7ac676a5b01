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


// Attack economics: per-call API pricing, per-query cost of a shadow-model
// attack versus the NLI-based attack, and whole-attack cost ratios. Money is
// held as integer pico-USD so sums and products are exact.

#ifndef MENTA_COST_H_
#define MENTA_COST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace menta {

using PicoUsd = int64_t;

inline constexpr PicoUsd kPicoPerUsd = 1'000'000'000'000;

// 2.43e-7 USD per NLI call.
inline constexpr PicoUsd kDefaultNliCost = 243'000;

// Converts a USD amount with at most 12 decimal places.
PicoUsd PicoFromUsd(double usd);
double UsdFromPico(PicoUsd pico);

// Exact scientific notation, e.g. 156000000 -> "1.56e-04".
std::string FormatUsd(PicoUsd pico);

struct PricingModel {
  std::string name;
  // USD per 1M tokens, scaled by 1e6. One unit is then one pico-USD per
  // token.
  int64_t price_in_micro = 0;
  int64_t price_out_micro = 0;

  // Prices in USD per 1M tokens, at most 6 decimal places.
  static PricingModel FromUsd(std::string name, double price_in,
                              double price_out);
};

// The five shipped models.
const std::vector<PricingModel>& DefaultPricing();

// JSON array of {name, price_in, price_out}.
std::vector<PricingModel> ParsePricing(const nlohmann::json& j);
std::vector<PricingModel> LoadPricing(const std::filesystem::path& path);

// Throws kInvalidArgument naming the model when absent.
const PricingModel& FindPricing(const std::vector<PricingModel>& models,
                                std::string_view name);

PicoUsd CallCost(const PricingModel& p, int64_t t_in, int64_t t_out);

enum class AttackStyle { kShadow, kNli };

std::string_view AttackStyleName(AttackStyle s);

struct AttackCostSpec {
  std::optional<PricingModel> shadow;
  PricingModel blackbox;
  int64_t t_in_shadow = 0;
  int64_t t_in_blackbox = 0;
  int64_t out_shadow = 10;
  int64_t out_blackbox = 100;
  PicoUsd nli_cost_per_call = kDefaultNliCost;
  int64_t budget = 1;

  void Validate() const;

  // Shadow-model attack: both calls capped at 10 output tokens, 30 queries.
  static AttackCostSpec ShadowStyle(PricingModel shadow, PricingModel blackbox,
                                    int64_t t_in_shadow, int64_t t_in_blackbox,
                                    int64_t budget = 30);
  // NLI attack: one 100-token black-box answer plus one NLI pass, 5 queries.
  static AttackCostSpec NliStyle(PricingModel blackbox, int64_t t_in_blackbox,
                                 int64_t budget = 5);
};

// kShadow: c_sh(t_in_shadow, out_shadow) + c_bb(t_in_blackbox, out_blackbox)
// kNli:    c_bb(t_in_blackbox, out_blackbox) + nli_cost_per_call
PicoUsd PerQueryCost(const AttackCostSpec& spec, AttackStyle style);

PicoUsd AttackCost(const AttackCostSpec& spec, AttackStyle style);

// (budget_shadow * per_query_shadow) / (budget_nli * per_query_nli).
double AttackCostRatio(const AttackCostSpec& shadow_spec,
                       const AttackCostSpec& nli_spec);

}  // namespace menta

#endif  // MENTA_COST_H_
