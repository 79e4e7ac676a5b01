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


#include "menta/cost.h"

#include <cmath>

#include "menta/error.h"
#include "menta/io.h"

namespace menta {

using nlohmann::json;

namespace {

int64_t CheckedMul(int64_t a, int64_t b) {
  int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw InvalidArgument("cost overflows 64-bit pico-USD");
  }
  return out;
}

int64_t CheckedAdd(int64_t a, int64_t b) {
  int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw InvalidArgument("cost overflows 64-bit pico-USD");
  }
  return out;
}

int64_t ScaleExact(double value, double scale, std::string_view what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw InvalidArgument(std::string(what) + " must be a finite value >= 0");
  }
  const double scaled = value * scale;
  const double rounded = std::round(scaled);
  if (std::fabs(scaled - rounded) > 1e-3 || rounded > 9e18) {
    throw InvalidArgument(std::string(what) + " is not representable exactly");
  }
  return static_cast<int64_t>(rounded);
}

}  // namespace

PicoUsd PicoFromUsd(double usd) { return ScaleExact(usd, 1e12, "USD amount"); }

double UsdFromPico(PicoUsd pico) {
  return static_cast<double>(pico) / static_cast<double>(kPicoPerUsd);
}

std::string FormatUsd(PicoUsd pico) {
  if (pico == 0) return "0";
  std::string sign;
  std::string digits = std::to_string(pico);
  if (digits[0] == '-') {
    sign = "-";
    digits.erase(0, 1);
  }
  const int exponent = static_cast<int>(digits.size()) - 1 - 12;
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  std::string mantissa = digits.substr(0, 1);
  if (digits.size() > 1) mantissa += "." + digits.substr(1);
  char exp[16];
  std::snprintf(exp, sizeof(exp), "e%c%02d", exponent < 0 ? '-' : '+',
                std::abs(exponent));
  return sign + mantissa + exp;
}

PricingModel PricingModel::FromUsd(std::string name, double price_in,
                                   double price_out) {
  PricingModel p;
  p.name = std::move(name);
  p.price_in_micro = ScaleExact(price_in, 1e6, p.name + " price_in");
  p.price_out_micro = ScaleExact(price_out, 1e6, p.name + " price_out");
  return p;
}

const std::vector<PricingModel>& DefaultPricing() {
  static const std::vector<PricingModel> kModels = {
      {"GPT-4o-mini", 150'000, 600'000},
      {"Phi4-14B", 60'000, 140'000},
      {"CommandR-7B", 37'500, 150'000},
      {"Llama3.1-8B", 20'000, 30'000},
      {"Gemma2-2B", 8'500, 34'000},
  };
  return kModels;
}

std::vector<PricingModel> ParsePricing(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "pricing must be a JSON array");
  std::vector<PricingModel> out;
  for (const auto& e : j) {
    try {
      out.push_back(PricingModel::FromUsd(e.at("name").get<std::string>(),
                                          e.at("price_in").get<double>(),
                                          e.at("price_out").get<double>()));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kParse, std::string("pricing entry: ") + ex.what());
    }
  }
  return out;
}

std::vector<PricingModel> LoadPricing(const std::filesystem::path& path) {
  return ParsePricing(io::ReadJsonFile(path));
}

const PricingModel& FindPricing(const std::vector<PricingModel>& models,
                                std::string_view name) {
  for (const auto& m : models) {
    if (m.name == name) return m;
  }
  throw InvalidArgument("no pricing entry for model '" + std::string(name) + "'");
}

PicoUsd CallCost(const PricingModel& p, int64_t t_in, int64_t t_out) {
  if (t_in < 0 || t_out < 0) throw InvalidArgument("token counts must be >= 0");
  return CheckedAdd(CheckedMul(p.price_in_micro, t_in),
                    CheckedMul(p.price_out_micro, t_out));
}

std::string_view AttackStyleName(AttackStyle s) {
  return s == AttackStyle::kShadow ? "shadow" : "nli";
}

void AttackCostSpec::Validate() const {
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  if (t_in_shadow < 0 || t_in_blackbox < 0 || out_shadow < 0 ||
      out_blackbox < 0) {
    throw InvalidArgument("token counts must be >= 0");
  }
  if (nli_cost_per_call < 0) throw InvalidArgument("NLI cost must be >= 0");
}

AttackCostSpec AttackCostSpec::ShadowStyle(PricingModel shadow,
                                           PricingModel blackbox,
                                           int64_t t_in_shadow,
                                           int64_t t_in_blackbox,
                                           int64_t budget) {
  AttackCostSpec s;
  s.shadow = std::move(shadow);
  s.blackbox = std::move(blackbox);
  s.t_in_shadow = t_in_shadow;
  s.t_in_blackbox = t_in_blackbox;
  s.out_shadow = 10;
  s.out_blackbox = 10;
  s.budget = budget;
  return s;
}

AttackCostSpec AttackCostSpec::NliStyle(PricingModel blackbox,
                                        int64_t t_in_blackbox, int64_t budget) {
  AttackCostSpec s;
  s.blackbox = std::move(blackbox);
  s.t_in_blackbox = t_in_blackbox;
  s.out_blackbox = 100;
  s.budget = budget;
  return s;
}

PicoUsd PerQueryCost(const AttackCostSpec& spec, AttackStyle style) {
  spec.Validate();
  const PicoUsd bb = CallCost(spec.blackbox, spec.t_in_blackbox, spec.out_blackbox);
  if (style == AttackStyle::kNli) return CheckedAdd(bb, spec.nli_cost_per_call);
  if (!spec.shadow) {
    throw Error(ErrorCode::kConfiguration,
                "shadow-style cost needs shadow model pricing");
  }
  return CheckedAdd(CallCost(*spec.shadow, spec.t_in_shadow, spec.out_shadow), bb);
}

PicoUsd AttackCost(const AttackCostSpec& spec, AttackStyle style) {
  return CheckedMul(spec.budget, PerQueryCost(spec, style));
}

double AttackCostRatio(const AttackCostSpec& shadow_spec,
                       const AttackCostSpec& nli_spec) {
  const PicoUsd num = AttackCost(shadow_spec, AttackStyle::kShadow);
  const PicoUsd den = AttackCost(nli_spec, AttackStyle::kNli);
  if (den == 0) throw Error(ErrorCode::kDivergence, "NLI-style attack cost is zero");
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace menta
