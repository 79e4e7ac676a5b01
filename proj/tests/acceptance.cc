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

// Acceptance checks, one PASS/FAIL line each. Exit status is 0 iff the set
// of failing checks equals the set named with --expect-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "menta/attack.h"
#include "menta/corpus.h"
#include "menta/cost.h"
#include "menta/decision.h"
#include "menta/detectors.h"
#include "menta/experiment.h"
#include "menta/io.h"
#include "menta/metrics.h"
#include "menta/mock_backends.h"
#include "menta/rag_target.h"
#include "menta/retrieval.h"
#include "menta/rng.h"
#include "menta/text.h"
#include "oracles.h"

namespace menta {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double MinOf(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

double MaxOf(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

Outcome EndToEnd() {
  ExperimentConfig cfg;  // 20/20 documents, 4 facts, budget 5, top-k 3
  cfg.seeds = {0};
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = RunExperiment(cfg, ExperimentBackends::Mock());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& all = result.seeds[0].all_scores;
  const double lo = MinOf(all.member_scores);
  const double hi = MaxOf(all.non_member_scores);
  const double full_auc = Auc(all);
  return {result.mean.auc == 1.0 && full_auc == 1.0 && lo > hi && secs < 10.0 &&
              all.member_scores.size() == 20 && all.non_member_scores.size() == 20,
          Fmt("auc=%.4f min_member=%.3f max_non_member=%.3f", full_auc, lo, hi) +
              Fmt(" time=%.3fs", secs)};
}

Outcome ScoringOracle() {
  Rng rng(1);
  size_t mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const size_t n = 1 + rng.UniformInt(30);
    std::vector<int> ent(n);
    std::vector<int> idk(n);
    std::vector<QuerySignal> signals(n);
    for (size_t i = 0; i < n; ++i) {
      // A query either entails, abstains, or neither.
      const auto kind = rng.UniformInt(3);
      ent[i] = kind == 0;
      idk[i] = kind == 1;
      signals[i].i_ent = ent[i];
      signals[i].i_idk = idk[i];
    }
    const double s = MiaScore(ent, idk);
    const double expected = oracle::MiaScore(ent, idk);
    if (s != expected || MiaScore(signals) != expected || s < -1.0 || s > 1.0) {
      ++mismatches;
    }
  }
  return {mismatches == 0, Fmt("1000 vectors, %g mismatches", static_cast<double>(mismatches))};
}

Outcome NeymanPearson() {
  Rng rng(2);
  size_t checks = 0;
  size_t bad = 0;
  for (int t = 0; t < 200; ++t) {
    double a = 0.0;
    double b = 0.0;
    do {
      a = 0.001 + 0.998 * rng.Uniform01();
      b = 0.001 + 0.998 * rng.Uniform01();
    } while (std::abs(a - b) < 1e-6);
    const BernoulliHypotheses h{std::max(a, b), std::min(a, b)};
    for (int n = 1; n <= 20; ++n) {
      for (int s = 0; s < n; ++s) {
        ++checks;
        if (!(NpLogLr(s + 1, n, h) > NpLogLr(s, n, h) + 1e-12)) ++bad;
      }
      for (int tau = -1; tau <= n; ++tau) {
        const double lr_tau = NpLogLrThreshold(tau, n, h);
        for (int s = 0; s <= n; ++s) {
          ++checks;
          const bool by_count = NpDecide(s, n, h, tau) == Membership::kMember;
          const double lr = NpLogLr(s, n, h);
          if (std::abs(lr - lr_tau) <= 1e-12 || by_count != (lr > lr_tau)) ++bad;
        }
      }
    }
  }
  return {bad == 0, Fmt("%g comparisons, %g disagreements", static_cast<double>(checks),
                        static_cast<double>(bad))};
}

Outcome MetricsOracle() {
  Rng rng(3);
  size_t bad = 0;
  for (int t = 0; t < 500; ++t) {
    const size_t total = 2 + rng.UniformInt(49);
    const size_t p = 1 + rng.UniformInt(total - 1);
    ScoredPopulation pop;
    const bool coarse = t % 2 == 0;
    for (size_t i = 0; i < total; ++i) {
      const double s = coarse ? static_cast<double>(rng.UniformInt(9)) / 4.0 - 1.0
                              : 2.0 * rng.Uniform01() - 1.0;
      (i < p ? pop.member_scores : pop.non_member_scores).push_back(s);
    }
    const auto row = ComputeMetrics(pop);
    bool ok = row.auc == oracle::Auc(pop.member_scores, pop.non_member_scores) &&
              row.accuracy == oracle::BestAccuracy(pop.member_scores, pop.non_member_scores);
    for (size_t k = 0; k < kTprFprTargets.size(); ++k) {
      ok &= row.tpr_at[k] ==
            oracle::TprAtFpr(pop.member_scores, pop.non_member_scores, kTprFprTargets[k]);
    }
    bad += !ok;
  }
  return {bad == 0, Fmt("500 populations, %g mismatches", static_cast<double>(bad))};
}

Outcome CostArithmetic() {
  const auto& mini = FindPricing(DefaultPricing(), "GPT-4o-mini");
  const PicoUsd call = CallCost(mini, 1000, 10);
  auto nli = AttackCostSpec::NliStyle(mini, 0, 1);
  nli.out_blackbox = 0;
  const PicoUsd nli_only = PerQueryCost(nli, AttackStyle::kNli);
  auto shadow = AttackCostSpec::ShadowStyle(mini, mini, 0, 200, 30);
  shadow.out_shadow = 0;
  auto five = AttackCostSpec::NliStyle(mini, 200, 5);
  five.out_blackbox = shadow.out_blackbox;
  five.nli_cost_per_call = 0;
  const double ratio = AttackCostRatio(shadow, five);
  return {call == 156'000'000 && FormatUsd(call) == "1.56e-04" &&
              nli_only == 243'000 && FormatUsd(nli_only) == "2.43e-07" && ratio == 6.0,
          "call=" + FormatUsd(call) + " nli_only=" + FormatUsd(nli_only) +
              Fmt(" ratio=%.17g", ratio)};
}

Outcome DefenseInvariants() {
  std::vector<std::string> failures;
  // DP identity for large epsilon.
  const auto corpus = SynthCorpus(10, 10, 4, 4);
  for (double eps : {20.0, 30.0, 50.0}) {
    for (size_t i = 0; i < corpus.docs.size(); ++i) {
      if (DpPerturb(corpus.docs[i].text, eps, i) != corpus.docs[i].text) {
        failures.push_back(Fmt("dp not identity at eps=%g", eps));
        break;
      }
    }
  }
  // Empirical drop rate at epsilon 0.1.
  std::string words;
  for (int i = 0; i < 10000; ++i) words += "t ";
  const double dropped =
      1.0 - static_cast<double>(text::SplitWhitespace(DpPerturb(words, 0.1, 7)).size()) / 10000.0;
  if (std::abs(dropped - 0.475) > 0.01) failures.push_back(Fmt("drop rate %.4f", dropped));

  // Rerank keeps the retrieved set.
  auto embed = std::make_shared<MockEmbedBackend>();
  auto chat = std::make_shared<MockChatBackend>();
  auto index = std::make_shared<RetrievalIndex>(RetrievalIndex::Build(
      MemberDocuments(corpus.docs, corpus.split), RetrieverKind::kDense, embed));
  RagConfig plain_cfg;
  plain_cfg.generator = chat;
  plain_cfg.index = index;
  RagConfig rerank_cfg = plain_cfg;
  rerank_cfg.defenses = {DefenseSpec::Of(DefenseKind::kRerankShuffle, 11)};
  const RagTarget plain(plain_cfg);
  const RagTarget rerank(rerank_cfg);
  for (const auto& d : corpus.docs) {
    auto ids = [&](const RagTarget& t) {
      std::multiset<std::string> out;
      const auto ex = t.AnswerQuery(d.text);
      for (const auto& r : ex.RetrievedForEvaluation()) out.insert(r.doc_id);
      return out;
    };
    if (ids(plain) != ids(rerank)) {
      failures.push_back("rerank changed the retrieved set for " + d.doc_id);
      break;
    }
  }

  // DP on the mock pipeline: AUC must drop but stay above 0.8.
  ExperimentConfig base;
  base.seeds = {0, 1, 2, 3, 4};
  ExperimentConfig dp = base;
  dp.defenses = {DefenseKind::kDpOutput};
  dp.epsilon = 0.1;
  const auto clean = RunExperiment(base, ExperimentBackends::Mock());
  const auto noisy = RunExperiment(dp, ExperimentBackends::Mock());
  double min_dp = 1.0;
  for (const auto& s : noisy.seeds) min_dp = std::min(min_dp, s.metrics.auc);
  const bool decreased = noisy.mean.auc < clean.mean.auc;
  const bool above = min_dp > 0.8;
  if (!decreased) {
    failures.push_back(Fmt("dp auc %.4f not below clean auc %.4f", noisy.mean.auc,
                           clean.mean.auc));
  }
  if (!above) failures.push_back(Fmt("dp auc %.4f not above 0.8", min_dp));

  std::string detail = Fmt("drop_rate=%.4f clean_auc=%.4f dp_auc=%.4f", dropped,
                           clean.mean.auc, noisy.mean.auc);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

Outcome MinEntailedMonotone() {
  ExperimentConfig cfg;
  cfg.seeds = {5};
  const auto result = RunExperiment(cfg, ExperimentBackends::Mock());
  size_t bad = 0;
  size_t docs = 0;
  for (const auto& r : result.seeds[0].reports) {
    ++docs;
    int prev = std::numeric_limits<int>::max();
    for (int m = 1; m <= 6; ++m) {
      int count = 0;
      for (int x : RescoreReport(r, m).EntIndicators()) count += x;
      if (count > prev) ++bad;
      prev = count;
    }
  }
  return {bad == 0 && docs > 0,
          Fmt("%g documents x min_entailed 1..6, %g increases", static_cast<double>(docs),
              static_cast<double>(bad))};
}

Outcome RetrievalOracle() {
  const auto docs = SynthCorpus(100, 100, 3, 8).docs;
  auto embed = std::make_shared<MockEmbedBackend>();
  const auto bm25 = RetrievalIndex::Build(docs, RetrieverKind::kBm25);
  const auto dense = RetrievalIndex::Build(docs, RetrieverKind::kDense, embed);
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  std::vector<std::vector<double>> vecs;
  for (const auto& d : docs) {
    ids.push_back(d.doc_id);
    texts.push_back(RetrievalIndex::IndexText(d));
    vecs.push_back(embed->Embed(texts.back()).values);
  }
  std::vector<std::string> vocab;
  for (const auto& t : texts) {
    for (auto& w : oracle::Words(t)) vocab.push_back(std::move(w));
  }
  Rng rng(4);
  size_t bad = 0;
  for (int q = 0; q < 100; ++q) {
    std::string query;
    const size_t len = 1 + rng.UniformInt(8);
    for (size_t w = 0; w < len; ++w) query += vocab[rng.UniformInt(vocab.size())] + " ";
    const size_t k = 1 + rng.UniformInt(10);
    std::vector<std::string> got;
    for (const auto& r : bm25.Retrieve(query, k)) got.push_back(r.doc_id);
    bad += got != oracle::TopK(ids, oracle::Bm25Scores(texts, query), k);
    const auto qv = embed->Embed(query).values;
    std::vector<double> cos;
    for (const auto& v : vecs) cos.push_back(oracle::CosineOf(qv, v));
    got.clear();
    for (const auto& r : dense.Retrieve(query, k)) got.push_back(r.doc_id);
    bad += got != oracle::TopK(ids, cos, k);
  }
  return {bad == 0, Fmt("100 queries x {bm25, dense} over 200 docs, %g mismatches",
                        static_cast<double>(bad))};
}

Outcome DetectorProtocol() {
  std::vector<std::string> failures;
  auto by_prefix = [](std::string prefix) -> Detector {
    return [prefix](const std::string& q) {
      DetectorVerdict v;
      v.flagged = q.rfind(prefix, 0) == 0;
      return v;
    };
  };
  struct MiniSet {
    std::vector<std::string> attacks;
    std::vector<std::string> benign;
    double recall;
    double fpr;
  };
  const std::vector<MiniSet> sets = {
      {{"x1", "x2", "a3", "a4"}, {"x5", "b6", "b7", "b8"}, 0.5, 0.25},
      {{"x1", "x2", "x3"}, {"b1", "b2"}, 1.0, 0.0},
      {{"a1", "a2", "a3", "a4", "x5"}, {"x1", "x2", "b3"}, 0.2, 2.0 / 3.0},
  };
  for (size_t i = 0; i < sets.size(); ++i) {
    const auto r = EvaluateDetector(by_prefix("x"), sets[i].attacks, sets[i].benign);
    if (r.recall_on_attacks != sets[i].recall || r.fpr_on_benign != sets[i].fpr) {
      failures.push_back(Fmt("mini-set %g gave (%.4f, %.4f)", static_cast<double>(i + 1),
                             r.recall_on_attacks, r.fpr_on_benign));
    }
  }

  auto embed = std::make_shared<MockEmbedBackend>();
  const auto corpus = SynthCorpus(20, 20, 4, 0);
  const auto index = RetrievalIndex::Build(MemberDocuments(corpus.docs, corpus.split),
                                           RetrieverKind::kDense, embed);
  const auto& target = index.entries()[0].doc;
  const auto verbatim = SimilaritySpikeDetect(target.text, index);
  if (!verbatim.flagged) failures.push_back("verbatim document query not flagged");

  std::string nonce;
  for (int i = 0; nonce.empty(); ++i) {
    const std::string w = "nonce" + std::to_string(i);
    const auto v = embed->Embed(w);
    size_t bucket = 0;
    while (v.values[bucket] == 0.0) ++bucket;
    bool unused = true;
    for (const auto& e : index.entries()) unused &= e.vector.values[bucket] == 0.0;
    if (unused) nonce = w;
  }
  const auto uniform = SimilaritySpikeDetect(nonce, index);
  if (uniform.flagged || uniform.statistic != 0.0) {
    failures.push_back("uniform-similarity query flagged");
  }
  std::string detail = Fmt("verbatim z=%.2f p=%.2g", verbatim.statistic,
                           verbatim.p_value.value_or(1.0)) +
                       Fmt(" uniform z=%.2f", uniform.statistic);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

Outcome Determinism() {
  ExperimentConfig cfg;
  cfg.seeds = {7};
  const auto base = fs::temp_directory_path() / "menta_acceptance_determinism";
  fs::remove_all(base);
  RunExperiment(cfg, ExperimentBackends::Mock(), {1, base / "a", false});
  RunExperiment(cfg, ExperimentBackends::Mock(), {1, base / "b", false});
  RunExperiment(cfg, ExperimentBackends::Mock(), {4, base / "c", false});
  bool same = true;
  for (const char* f : {"reports.jsonl", "metrics.json"}) {
    const auto a = io::ReadFile(base / "a" / f);
    same &= a == io::ReadFile(base / "b" / f) && a == io::ReadFile(base / "c" / f);
  }
  const std::string digest = io::Sha256Hex(io::ReadFile(base / "a" / "reports.jsonl"));
  fs::remove_all(base);
  return {same, "reports.jsonl sha256=" + digest.substr(0, 16) + " (serial x2, 4 jobs)"};
}

int Main(int argc, char** argv) {
  std::set<std::string> expected_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      expected_fail.insert(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--expect-fail NAME]...\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"end_to_end_mock", EndToEnd},
      {"scoring_oracle", ScoringOracle},
      {"neyman_pearson_suite", NeymanPearson},
      {"metrics_oracle", MetricsOracle},
      {"cost_arithmetic", CostArithmetic},
      {"defense_invariants", DefenseInvariants},
      {"min_entailed_monotonicity", MinEntailedMonotone},
      {"retrieval_oracle", RetrievalOracle},
      {"detector_protocol", DetectorProtocol},
      {"determinism", Determinism},
  };
  std::set<std::string> failed;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(name);
    std::printf("%s %s: %s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                !o.pass && expected_fail.contains(name) ? " [expected]" : "");
    std::fflush(stdout);
  }
  std::printf("%zu/%zu passed\n", checks.size() - failed.size(), checks.size());
  if (failed != expected_fail) {
    for (const auto& n : expected_fail) {
      if (!failed.contains(n)) std::printf("note: %s was expected to fail but passed\n", n.c_str());
    }
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace menta

int main(int argc, char** argv) { return menta::Main(argc, argv); }
