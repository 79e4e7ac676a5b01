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


// menta: corpus preparation, attack runs, sweeps, detector evaluation and
// cost reports.
//
// Exit status: 0 success, 2 usage or validation, 3 backend or transport,
// 4 run invalidated.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "menta/attack.h"
#include "menta/corpus.h"
#include "menta/cost.h"
#include "menta/detectors.h"
#include "menta/error.h"
#include "menta/experiment.h"
#include "menta/io.h"
#include "menta/metrics.h"
#include "menta/text.h"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace menta {
namespace {

// Flags shared by attack, sweep and detect. Only flags given on the command
// line override the config file.
struct RunFlags {
  std::string config;
  std::string dataset;
  std::string split;
  size_t members = 20;
  size_t non_members = 20;
  size_t facts = 4;
  size_t budget = 5;
  size_t top_k = 3;
  std::string retriever = "dense";
  std::vector<std::string> defenses;
  double epsilon = 0.1;
  std::string scoring = "entailment";
  int min_entailed = 1;
  std::vector<int64_t> seeds;
  std::string query_cache;
  bool query_fixture = false;
  bool mock = false;
  size_t jobs = 1;
  std::string out = "run";

  std::vector<CLI::Option*> options;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f, bool attack_flags) {
  auto add = [&](CLI::Option* o) { f.options.push_back(o); };
  add(cmd->add_option("--config", f.config, "Flat JSON config file"));
  add(cmd->add_option("--dataset", f.dataset, "Corpus JSONL (synthetic when absent)"));
  add(cmd->add_option("--split", f.split, "split.json for --dataset"));
  add(cmd->add_option("--members", f.members, "Member count"));
  add(cmd->add_option("--non-members", f.non_members, "Non-member count"));
  add(cmd->add_option("--facts", f.facts, "Facts per synthetic document"));
  add(cmd->add_option("--seed", f.seeds, "Seed (repeatable)"));
  add(cmd->add_option("--retriever", f.retriever, "bm25 or dense")
          ->check(CLI::IsMember({"bm25", "dense"})));
  add(cmd->add_option("--top-k", f.top_k, "Retrieved contexts per query"));
  if (attack_flags) {
    add(cmd->add_option("--budget", f.budget, "Queries per document"));
    add(cmd->add_option("--defense", f.defenses,
                        "none, dp, rerank, paraphrase or instruction (repeatable)")
            ->check(CLI::IsMember({"none", "dp", "rerank", "paraphrase", "instruction"})));
    add(cmd->add_option("--epsilon", f.epsilon, "DP epsilon"));
    add(cmd->add_option("--scoring", f.scoring, "entailment or similarity")
            ->check(CLI::IsMember({"entailment", "similarity"})));
    add(cmd->add_option("--min-entailed", f.min_entailed,
                        "Entailed claims needed per query"));
    add(cmd->add_option("--query-cache", f.query_cache, "Query JSONL sidecar"));
    add(cmd->add_flag("--query-fixture", f.query_fixture,
                      "Only use cached queries"));
  }
  cmd->add_flag("--mock", f.mock, "Use deterministic mock backends");
  cmd->add_option("--jobs", f.jobs, "Documents attacked concurrently");
  cmd->add_option("--out", f.out, "Output directory");
}

bool Given(const RunFlags& f, const std::string& name) {
  for (auto* o : f.options) {
    if (o->check_lname(name.substr(2)) && o->count() > 0) return true;
  }
  return false;
}

ExperimentConfig ResolveConfig(const RunFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) c = ExperimentConfig::FromJson(io::ReadJsonFile(f.config));
  if (Given(f, "--dataset")) c.dataset = f.dataset;
  if (Given(f, "--split")) c.split = f.split;
  if (Given(f, "--members")) c.n_members = f.members;
  if (Given(f, "--non-members")) c.n_non_members = f.non_members;
  if (Given(f, "--facts")) c.facts_per_doc = f.facts;
  if (Given(f, "--budget")) c.budget = f.budget;
  if (Given(f, "--top-k")) c.top_k = f.top_k;
  if (Given(f, "--retriever")) c.retriever = ParseRetrieverKind(f.retriever);
  if (Given(f, "--defense")) {
    c.defenses.clear();
    for (const auto& d : f.defenses) {
      if (d != "none") c.defenses.push_back(ParseDefenseKind(d));
    }
  }
  if (Given(f, "--epsilon")) c.epsilon = f.epsilon;
  if (Given(f, "--scoring")) c.scoring = ParseScoringVariant(f.scoring);
  if (Given(f, "--min-entailed")) c.min_entailed = f.min_entailed;
  if (Given(f, "--seed")) c.seeds = f.seeds;
  if (Given(f, "--query-cache")) c.query_cache = f.query_cache;
  if (Given(f, "--query-fixture")) c.query_fixture = f.query_fixture;
  c.Validate();
  return c;
}

ExperimentBackends ResolveBackends(const RunFlags& f, const ExperimentConfig& c,
                                   bool need_embed = false) {
  if (f.mock) return ExperimentBackends::Mock();
  return ExperimentBackends::FromEnv(need_embed ||
                                     c.retriever == RetrieverKind::kDense ||
                                     c.scoring == ScoringVariant::kSimilarity);
}

void PrintMetrics(const MetricsRow& m) {
  std::printf("auc %.6f\naccuracy %.6f\n", m.auc, m.accuracy);
  for (size_t i = 0; i < kTprFprTargets.size(); ++i) {
    std::printf("tpr@fpr=%g %.6f\n", kTprFprTargets[i], m.tpr_at[i]);
  }
}

int CmdSynth(size_t members, size_t non_members, size_t facts, uint64_t seed,
             size_t benign, const fs::path& out) {
  const auto corpus = SynthCorpus(members, non_members, facts, seed);
  fs::create_directories(out);
  SaveCorpus(out / "corpus.jsonl", corpus.docs);
  SaveSplit(out / "split.json", corpus.split);
  if (benign > 0) {
    const auto set = SynthBenignQueries(corpus.docs, benign, seed);
    std::string lines;
    for (const auto& q : set.queries) lines += json{{"query", q}}.dump() + "\n";
    io::WriteFileAtomic(out / "benign.jsonl", lines);
  }
  std::printf("wrote %zu documents to %s\n", corpus.docs.size(),
              (out / "corpus.jsonl").c_str());
  return 0;
}

int CmdIngest(const fs::path& path, std::optional<size_t> members,
              std::optional<size_t> non_members, uint64_t seed,
              const std::string& out) {
  const auto docs = LoadCorpus(path);
  std::printf("%zu documents\n", docs.size());
  if (out.empty()) return 0;
  fs::create_directories(out);
  SaveCorpus(fs::path(out) / "corpus.jsonl", docs);
  if (members || non_members) {
    const auto split =
        MakeSplit(docs, members.value_or(0), non_members.value_or(0), seed);
    SaveSplit(fs::path(out) / "split.json", split);
  }
  return 0;
}

int CmdAttack(const RunFlags& f, bool resume) {
  const auto cfg = ResolveConfig(f);
  const auto backends = ResolveBackends(f, cfg);
  RunOptions opts;
  opts.jobs = f.jobs;
  opts.out_dir = f.out;
  opts.resume = resume;
  const auto result = RunExperiment(cfg, backends, opts);
  PrintMetrics(result.mean);
  std::printf("outputs in %s\n", f.out.c_str());
  return 0;
}

std::vector<std::string> ParseValues(const std::string& spec) {
  std::vector<std::string> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    long lo = 0;
    long hi = 0;
    try {
      lo = std::stol(spec.substr(0, dots));
      hi = std::stol(spec.substr(dots + 2));
    } catch (const std::exception&) {
      throw InvalidArgument("bad range '" + spec + "'");
    }
    if (lo > hi) throw InvalidArgument("empty range '" + spec + "'");
    for (long v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw InvalidArgument("no sweep values");
  return out;
}

size_t ParseCount(const std::string& v) {
  size_t pos = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || n < 0) throw InvalidArgument("bad count '" + v + "'");
  return static_cast<size_t>(n);
}

int CmdSweep(const RunFlags& f, const std::string& axis,
             const std::string& values_spec) {
  if (axis != "budget" && axis != "top_k" && axis != "min_entailed" &&
      axis != "defense") {
    throw InvalidArgument("unknown sweep axis '" + axis + "'");
  }
  const auto base = ResolveConfig(f);
  const auto values = ParseValues(values_spec);
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    ExperimentConfig c = base;
    if (axis == "budget") {
      c.budget = ParseCount(v);
    } else if (axis == "top_k") {
      c.top_k = ParseCount(v);
    } else if (axis == "min_entailed") {
      c.min_entailed = static_cast<int>(ParseCount(v));
    } else {
      c.defenses.clear();
      if (v != "none") c.defenses.push_back(ParseDefenseKind(v));
    }
    c.Validate();
    configs.push_back(std::move(c));
  }
  const auto backends = ResolveBackends(f, base);
  std::string csv = "axis,value,seed,auc,acc,tpr_005,tpr_01,tpr_05\n";
  RunOptions opts;
  opts.jobs = f.jobs;
  for (size_t i = 0; i < configs.size(); ++i) {
    const auto result = RunExperiment(configs[i], backends, opts);
    for (const auto& s : result.seeds) {
      char row[256];
      std::snprintf(row, sizeof(row), ",%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    static_cast<long long>(s.seed), s.metrics.auc,
                    s.metrics.accuracy, s.metrics.tpr_at[0], s.metrics.tpr_at[1],
                    s.metrics.tpr_at[2]);
      csv += axis + "," + values[i] + row;
    }
  }
  fs::create_directories(f.out);
  io::WriteFileAtomic(fs::path(f.out) / "sweep.csv", csv);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

struct DetectFlags {
  std::string detector = "spike";
  double rho = 0.05;
  size_t m = 10;
  std::string queries;
  std::string attack_set;
  std::string benign_set;
  bool generate = false;
  size_t n_benign = 0;
};

int CmdDetect(const RunFlags& f, const DetectFlags& d) {
  const auto cfg = ResolveConfig(f);
  const int64_t seed = cfg.seeds.front();
  const auto backends = ResolveBackends(f, cfg, d.detector == "spike");

  std::vector<LabeledQuery> labeled;
  if (d.generate) {
    auto prepared = PrepareSeed(cfg, backends, seed);
    for (const auto& doc : prepared.candidates) {
      for (const auto& q : GenerateQueries(doc, cfg.budget, *backends.query_gen, seed)) {
        labeled.push_back({q.final_query, QueryLabel::kAttack, "entailment"});
      }
    }
    const size_t n_benign = d.n_benign > 0 ? d.n_benign : labeled.size();
    for (auto& q : SynthBenignQueries(prepared.candidates, n_benign,
                                      static_cast<uint64_t>(seed))
                       .queries) {
      labeled.push_back({std::move(q), QueryLabel::kBenign, ""});
    }
    fs::create_directories(f.out);
    SaveDetectionSet(fs::path(f.out) / "detection.jsonl", labeled);
  } else if (!d.queries.empty()) {
    labeled = LoadDetectionSet(d.queries);
  } else {
    if (d.attack_set.empty()) throw InvalidArgument("missing attack query set");
    if (d.benign_set.empty()) throw InvalidArgument("missing benign query set");
    for (auto& q : LoadBenignQueries(d.attack_set).queries) {
      labeled.push_back({std::move(q), QueryLabel::kAttack, "attack"});
    }
    for (auto& q : LoadBenignQueries(d.benign_set).queries) {
      labeled.push_back({std::move(q), QueryLabel::kBenign, ""});
    }
  }

  std::map<std::string, std::vector<std::string>> attacks;
  std::vector<std::string> benign;
  for (const auto& q : labeled) {
    if (q.label == QueryLabel::kAttack) {
      attacks[q.attack_name.empty() ? "attack" : q.attack_name].push_back(q.query);
    } else {
      benign.push_back(q.query);
    }
  }
  if (benign.empty()) throw InvalidArgument("missing benign query set");
  if (attacks.empty()) throw InvalidArgument("missing attack query set");

  Detector detector;
  std::shared_ptr<const RetrievalIndex> index;
  if (d.detector == "spike") {
    ExperimentConfig dense = cfg;
    dense.retriever = RetrieverKind::kDense;
    index = PrepareSeed(dense, backends, seed).index;
    detector = [&, index](const std::string& q) {
      return SimilaritySpikeDetect(q, *index, d.rho, d.m);
    };
  } else {
    detector = [&](const std::string& q) { return LlmDetect(q, *backends.detector); };
  }

  ordered_json out;
  out["detector"] = d.detector;
  if (d.detector == "spike") {
    out["rho"] = d.rho;
    out["m"] = d.m;
  }
  ordered_json cells = ordered_json::object();
  for (const auto& [name, queries] : attacks) {
    cells[name] = DetectorResultToJson(EvaluateDetector(detector, queries, benign));
  }
  out["results"] = std::move(cells);
  fs::create_directories(f.out);
  const auto path = fs::path(f.out) / ("detect_" + d.detector + ".json");
  io::WriteFileAtomic(path, out.dump(2) + "\n");
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

struct CostFlags {
  std::string pricing = "default";
  std::string model;
  std::string shadow_model;
  std::optional<int64_t> t_in_bb;
  std::optional<int64_t> t_in_shadow;
  std::optional<int64_t> budget;
  int64_t budget_shadow = 30;
  double nli_cost = 2.43e-7;
  std::string from_run;
  bool json_out = false;
};

int CmdCost(const CostFlags& c) {
  const std::vector<PricingModel> models =
      c.pricing == "default" ? DefaultPricing() : LoadPricing(c.pricing);
  const std::string model_name = c.model.empty() ? "GPT-4o-mini" : c.model;
  const PricingModel& bb = FindPricing(models, model_name);
  const PricingModel& shadow =
      FindPricing(models, c.shadow_model.empty() ? model_name : c.shadow_model);

  int64_t t_in = c.t_in_bb.value_or(0);
  int64_t budget = c.budget.value_or(5);
  if (!c.from_run.empty()) {
    std::ifstream in(fs::path(c.from_run) / "reports.jsonl");
    if (!in) throw InvalidArgument("no reports.jsonl in " + c.from_run);
    long long total_in = 0;
    long long calls = 0;
    int64_t run_budget = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (text::Trim(line).empty()) continue;
      const auto report = ReportFromJson(json::parse(line));
      run_budget = static_cast<int64_t>(report.budget);
      for (const auto& q : report.queries) {
        if (!q.exchange) continue;
        total_in += q.exchange->input_tokens;
        ++calls;
      }
    }
    if (calls == 0) throw InvalidArgument("run has no answered queries");
    if (!c.t_in_bb) t_in = (total_in + calls / 2) / calls;
    if (!c.budget) budget = run_budget;
  }

  AttackCostSpec nli = AttackCostSpec::NliStyle(bb, t_in, budget);
  nli.nli_cost_per_call = PicoFromUsd(c.nli_cost);
  const AttackCostSpec sh = AttackCostSpec::ShadowStyle(
      shadow, bb, c.t_in_shadow.value_or(t_in), t_in, c.budget_shadow);

  const PicoUsd nli_q = PerQueryCost(nli, AttackStyle::kNli);
  const PicoUsd nli_a = AttackCost(nli, AttackStyle::kNli);
  const PicoUsd sh_q = PerQueryCost(sh, AttackStyle::kShadow);
  const PicoUsd sh_a = AttackCost(sh, AttackStyle::kShadow);
  const double ratio = AttackCostRatio(sh, nli);
  if (c.json_out) {
    ordered_json j;
    j["model"] = bb.name;
    j["shadow_model"] = shadow.name;
    j["t_in_blackbox"] = t_in;
    j["t_in_shadow"] = sh.t_in_shadow;
    j["nli_style"] = {{"budget", budget},
                      {"per_query_usd", FormatUsd(nli_q)},
                      {"per_attack_usd", FormatUsd(nli_a)}};
    j["shadow_style"] = {{"budget", c.budget_shadow},
                         {"per_query_usd", FormatUsd(sh_q)},
                         {"per_attack_usd", FormatUsd(sh_a)}};
    j["ratio_shadow_over_nli"] = ratio;
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
  }
  std::printf("model %s, input tokens %lld\n", bb.name.c_str(),
              static_cast<long long>(t_in));
  std::printf("nli_style    per_query %s  per_attack %s  (budget %lld)\n",
              FormatUsd(nli_q).c_str(), FormatUsd(nli_a).c_str(),
              static_cast<long long>(budget));
  std::printf("shadow_style per_query %s  per_attack %s  (budget %lld, shadow %s)\n",
              FormatUsd(sh_q).c_str(), FormatUsd(sh_a).c_str(),
              static_cast<long long>(c.budget_shadow), shadow.name.c_str());
  std::printf("ratio shadow/nli %.4f\n", ratio);
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Document membership inference against RAG systems"};
  app.require_subcommand(1);

  size_t synth_members = 20, synth_non_members = 20, synth_facts = 4, synth_benign = 0;
  uint64_t synth_seed = 0;
  std::string synth_out = ".";
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus and split");
  synth->add_option("--members", synth_members);
  synth->add_option("--non-members", synth_non_members);
  synth->add_option("--facts", synth_facts);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--benign", synth_benign, "Also write N benign queries");
  synth->add_option("--out", synth_out);

  std::string ingest_path, ingest_out;
  std::optional<size_t> ingest_members, ingest_non_members;
  uint64_t ingest_seed = 0;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus, optionally split it");
  ingest->add_option("path", ingest_path)->required();
  ingest->add_option("--members", ingest_members);
  ingest->add_option("--non-members", ingest_non_members);
  ingest->add_option("--seed", ingest_seed);
  ingest->add_option("--out", ingest_out);

  RunFlags attack_flags;
  bool resume = false;
  auto* attack = app.add_subcommand("attack", "Run the membership attack");
  AddRunFlags(attack, attack_flags, true);
  attack->add_flag("--resume", resume, "Skip documents already in reports.jsonl");

  RunFlags sweep_flags;
  std::string axis, values;
  auto* sweep = app.add_subcommand("sweep", "Metrics over one varied setting");
  AddRunFlags(sweep, sweep_flags, true);
  sweep->add_option("--axis", axis, "budget, top_k, min_entailed or defense")->required();
  sweep->add_option("--values", values, "Comma list or lo..hi")->required();

  RunFlags detect_flags;
  DetectFlags d;
  auto* detect = app.add_subcommand("detect", "Evaluate a query detector");
  AddRunFlags(detect, detect_flags, true);
  detect->add_option("--detector", d.detector)->check(CLI::IsMember({"spike", "llm"}));
  detect->add_option("--rho", d.rho);
  detect->add_option("--m", d.m);
  detect->add_option("--queries", d.queries, "Labeled detection-set JSONL");
  detect->add_option("--attack-set", d.attack_set);
  detect->add_option("--benign-set", d.benign_set);
  detect->add_option("--n-benign", d.n_benign);
  detect->add_flag("--generate", d.generate,
                   "Build attack and benign sets from the corpus");

  CostFlags c;
  auto* cost = app.add_subcommand("cost", "Attack cost report");
  cost->add_option("--pricing", c.pricing, "default or a pricing JSON file");
  cost->add_option("--model", c.model, "Black-box model");
  cost->add_option("--shadow-model", c.shadow_model);
  cost->add_option("--t-in-bb", c.t_in_bb);
  cost->add_option("--t-in-shadow", c.t_in_shadow);
  cost->add_option("--budget", c.budget);
  cost->add_option("--budget-shadow", c.budget_shadow);
  cost->add_option("--nli-cost", c.nli_cost, "USD per NLI call");
  cost->add_option("--from-run", c.from_run, "Run directory with reports.jsonl");
  cost->add_flag("--json", c.json_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return CmdSynth(synth_members, synth_non_members, synth_facts, synth_seed,
                      synth_benign, synth_out);
    }
    if (ingest->parsed()) {
      return CmdIngest(ingest_path, ingest_members, ingest_non_members,
                       ingest_seed, ingest_out);
    }
    if (attack->parsed()) return CmdAttack(attack_flags, resume);
    if (sweep->parsed()) return CmdSweep(sweep_flags, axis, values);
    if (detect->parsed()) return CmdDetect(detect_flags, d);
    if (cost->parsed()) return CmdCost(c);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n",
                 std::string(ErrorCodeName(e.code())).c_str(), e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace menta

int main(int argc, char** argv) { return menta::Main(argc, argv); }
