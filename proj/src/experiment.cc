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


#include "menta/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "menta/error.h"
#include "menta/http_backends.h"
#include "menta/io.h"
#include "menta/mock_backends.h"
#include "menta/prompts.h"
#include "menta/rng.h"
#include "menta/text.h"

namespace menta {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kMaxInvalidFraction = 0.10;

std::string NowUtc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  if (min_entailed < 1) throw InvalidArgument("min_entailed must be >= 1");
  if (max_answer_tokens < 1) throw InvalidArgument("max_answer_tokens must be >= 1");
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw InvalidArgument("calibration_fraction must be in (0, 1)");
  }
  if (seeds.empty()) throw InvalidArgument("at least one seed is required");
  if (dataset.empty() && (n_members < 1 || n_non_members < 1 || facts_per_doc < 1)) {
    throw InvalidArgument("synthetic corpus counts must be >= 1");
  }
  if (!split.empty() && dataset.empty()) {
    throw InvalidArgument("split file given without a dataset");
  }
  if (query_fixture && query_cache.empty()) {
    throw InvalidArgument("query_fixture needs a query_cache path");
  }
  for (size_t i = 0; i < defenses.size(); ++i) {
    for (size_t j = i + 1; j < defenses.size(); ++j) {
      if (defenses[i] == defenses[j]) {
        throw InvalidArgument("defense listed twice: " +
                              std::string(DefenseKindName(defenses[i])));
      }
    }
  }
  if (std::find(defenses.begin(), defenses.end(), DefenseKind::kDpOutput) !=
          defenses.end() &&
      !(epsilon > 0.0)) {
    throw InvalidArgument("epsilon must be > 0");
  }
}

ordered_json ExperimentConfig::ToJson() const {
  ordered_json j;
  j["dataset"] = dataset;
  j["split"] = split;
  j["n_members"] = n_members;
  j["n_non_members"] = n_non_members;
  j["facts_per_doc"] = facts_per_doc;
  j["budget"] = budget;
  j["top_k"] = top_k;
  j["retriever"] = RetrieverKindName(retriever);
  ordered_json d = ordered_json::array();
  for (auto k : defenses) d.push_back(DefenseKindName(k));
  j["defenses"] = std::move(d);
  j["epsilon"] = epsilon;
  j["scoring"] = ScoringVariantName(scoring);
  j["min_entailed"] = min_entailed;
  j["seeds"] = seeds;
  j["calibration_fraction"] = calibration_fraction;
  j["max_answer_tokens"] = max_answer_tokens;
  j["query_cache"] = query_cache;
  j["query_fixture"] = query_fixture;
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "dataset") {
        c.dataset = v.get<std::string>();
      } else if (key == "split") {
        c.split = v.get<std::string>();
      } else if (key == "n_members") {
        c.n_members = v.get<size_t>();
      } else if (key == "n_non_members") {
        c.n_non_members = v.get<size_t>();
      } else if (key == "facts_per_doc") {
        c.facts_per_doc = v.get<size_t>();
      } else if (key == "budget") {
        c.budget = v.get<size_t>();
      } else if (key == "top_k") {
        c.top_k = v.get<size_t>();
      } else if (key == "retriever") {
        c.retriever = ParseRetrieverKind(v.get<std::string>());
      } else if (key == "defenses") {
        c.defenses.clear();
        for (const auto& d : v) {
          const auto name = d.get<std::string>();
          if (name != "none") c.defenses.push_back(ParseDefenseKind(name));
        }
      } else if (key == "epsilon") {
        c.epsilon = v.get<double>();
      } else if (key == "scoring") {
        c.scoring = ParseScoringVariant(v.get<std::string>());
      } else if (key == "min_entailed") {
        c.min_entailed = v.get<int>();
      } else if (key == "seeds") {
        c.seeds = v.get<std::vector<int64_t>>();
      } else if (key == "calibration_fraction") {
        c.calibration_fraction = v.get<double>();
      } else if (key == "max_answer_tokens") {
        c.max_answer_tokens = v.get<int>();
      } else if (key == "query_cache") {
        c.query_cache = v.get<std::string>();
      } else if (key == "query_fixture") {
        c.query_fixture = v.get<bool>();
      } else {
        throw InvalidArgument("unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw InvalidArgument("config key '" + key + "': " + e.what());
    }
  }
  return c;
}

std::string ExperimentConfig::Hash() const { return io::Sha256Hex(ToJson().dump()); }

ExperimentBackends ExperimentBackends::Mock() {
  ExperimentBackends b;
  auto chat = std::make_shared<MockChatBackend>();
  b.generator = chat;
  b.query_gen = chat;
  b.paraphraser = chat;
  b.detector = chat;
  b.nli = std::make_shared<MockNliBackend>();
  b.embed = std::make_shared<MockEmbedBackend>();
  return b;
}

ExperimentBackends ExperimentBackends::FromEnv(bool need_embed) {
  ExperimentBackends b;
  auto chat = std::make_shared<HttpChatBackend>(
      HttpBackendConfig::FromEnv("MENTA_CHAT_URL"));
  b.generator = chat;
  b.query_gen = chat;
  b.paraphraser = chat;
  b.detector = chat;
  b.nli = std::make_shared<HttpNliBackend>(HttpBackendConfig::FromEnv("MENTA_NLI_URL"));
  if (need_embed) {
    b.embed = std::make_shared<HttpEmbedBackend>(
        HttpBackendConfig::FromEnv("MENTA_EMBED_URL"));
  }
  return b;
}

ordered_json ExperimentBackends::Identities() const {
  ordered_json j;
  auto put = [&](const char* key, const auto& ptr) {
    j[key] = ptr ? ordered_json(ptr->Identity()) : ordered_json(nullptr);
  };
  put("generator", generator);
  put("query_gen", query_gen);
  put("paraphraser", paraphraser);
  put("detector", detector);
  put("nli", nli);
  put("embed", embed);
  return j;
}

PreparedSeed PrepareSeed(const ExperimentConfig& cfg,
                         const ExperimentBackends& backends, int64_t seed) {
  cfg.Validate();
  PreparedSeed p;
  p.seed = seed;
  const auto useed = static_cast<uint64_t>(seed);
  std::vector<Document> docs;
  if (cfg.dataset.empty()) {
    auto synth = SynthCorpus(cfg.n_members, cfg.n_non_members, cfg.facts_per_doc,
                             DeriveSeed(useed, "corpus"));
    docs = std::move(synth.docs);
    p.split = std::move(synth.split);
  } else {
    docs = LoadCorpus(cfg.dataset);
    p.split = cfg.split.empty()
                  ? MakeSplit(docs, cfg.n_members, cfg.n_non_members, useed,
                              cfg.calibration_fraction)
                  : LoadSplit(cfg.split);
  }
  p.candidates = ApplySplit(docs, p.split);

  if (cfg.retriever == RetrieverKind::kDense && !backends.embed) {
    throw Error(ErrorCode::kConfiguration, "dense retrieval needs an embedding backend");
  }
  p.index = std::make_shared<const RetrievalIndex>(RetrievalIndex::Build(
      MemberDocuments(docs, p.split), cfg.retriever,
      cfg.retriever == RetrieverKind::kDense ? backends.embed : nullptr));

  RagConfig rag;
  rag.top_k = cfg.top_k;
  rag.max_answer_tokens = cfg.max_answer_tokens;
  rag.generator = backends.generator;
  rag.paraphraser = backends.paraphraser;
  rag.index = p.index;
  rag.generator_seed = seed;
  for (auto kind : cfg.defenses) {
    const uint64_t dseed =
        DeriveSeed(useed, "defense." + std::string(DefenseKindName(kind)));
    rag.defenses.push_back(kind == DefenseKind::kDpOutput
                               ? DefenseSpec::Dp(cfg.epsilon, dseed)
                               : DefenseSpec::Of(kind, dseed));
  }
  p.target = std::make_unique<RagTarget>(std::move(rag));
  return p;
}

MetricsRow MeanMetrics(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw InvalidArgument("no metrics rows to average");
  MetricsRow m;
  for (const auto& r : rows) {
    m.auc += r.auc;
    m.accuracy += r.accuracy;
    for (size_t i = 0; i < m.tpr_at.size(); ++i) m.tpr_at[i] += r.tpr_at[i];
  }
  const double n = static_cast<double>(rows.size());
  m.auc /= n;
  m.accuracy /= n;
  for (auto& t : m.tpr_at) t /= n;
  return m;
}

void EvaluateReports(SeedResult& result, double calibration_fraction) {
  std::vector<size_t> members;
  std::vector<size_t> non_members;
  for (size_t i = 0; i < result.reports.size(); ++i) {
    auto& r = result.reports[i];
    r.decision.reset();
    r.threshold_used.reset();
    if (!r.valid) continue;
    (r.label == Membership::kMember ? members : non_members).push_back(i);
  }
  if (members.size() < 2 || non_members.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "calibration needs at least 2 valid members and 2 valid "
                "non-members");
  }
  const auto useed = static_cast<uint64_t>(result.seed);
  auto take = [&](std::vector<size_t> ids, std::string_view stream,
                  std::vector<size_t>& calib, std::vector<size_t>& eval) {
    Rng rng(DeriveSeed(useed, stream));
    rng.Shuffle(ids);
    auto k = static_cast<size_t>(
        std::llround(calibration_fraction * static_cast<double>(ids.size())));
    k = std::clamp<size_t>(k, 1, ids.size() - 1);
    calib.assign(ids.begin(), ids.begin() + static_cast<long>(k));
    eval.assign(ids.begin() + static_cast<long>(k), ids.end());
    std::sort(calib.begin(), calib.end());
    std::sort(eval.begin(), eval.end());
  };
  std::vector<size_t> cal_m, eval_m, cal_n, eval_n;
  take(members, "calibration.member", cal_m, eval_m);
  take(non_members, "calibration.non_member", cal_n, eval_n);

  auto scores = [&](const std::vector<size_t>& ids) {
    std::vector<double> out;
    for (size_t i : ids) out.push_back(result.reports[i].score);
    return out;
  };
  result.calibration = CalibrateThreshold(scores(cal_m), scores(cal_n));
  result.evaluation = {scores(eval_m), scores(eval_n)};
  result.all_scores = {scores(members), scores(non_members)};
  result.metrics = ComputeMetrics(result.evaluation);
  for (auto& r : result.reports) {
    if (!r.valid) continue;
    r.decision = result.calibration.Decide(r.score);
    r.threshold_used = result.calibration.tau;
  }
}

namespace {

struct ResumeState {
  std::map<std::pair<int64_t, std::string>, MembershipReport> done;
};

ResumeState LoadResumeState(const std::filesystem::path& reports_path) {
  ResumeState state;
  std::ifstream in(reports_path);
  if (!in) return state;
  std::string line;
  std::string kept;
  while (std::getline(in, line)) {
    if (text::Trim(line).empty()) continue;
    try {
      auto report = ReportFromJson(json::parse(line));
      state.done.emplace(std::make_pair(report.seed, report.doc_id), std::move(report));
      kept += line + "\n";
    } catch (const std::exception&) {
      break;  // torn final line from an interrupted write
    }
  }
  in.close();
  io::WriteFileAtomic(reports_path, kept);
  return state;
}

// Attacks candidates on `jobs` threads; `emit` sees reports in candidate
// order.
template <typename Emit>
void AttackAll(const PreparedSeed& prepared, const AttackBackends& backends,
               const AttackOptions& options, size_t jobs,
               const ResumeState& resume, Emit emit) {
  const auto& docs = prepared.candidates;
  std::vector<std::optional<MembershipReport>> slots(docs.size());
  std::vector<std::exception_ptr> errors(docs.size());
  std::vector<bool> ready(docs.size(), false);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};

  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= docs.size()) return;
      std::optional<MembershipReport> report;
      std::exception_ptr err;
      auto it = resume.done.find({prepared.seed, docs[i].doc_id});
      if (it != resume.done.end()) {
        report = it->second;
      } else {
        try {
          report = AttackDocument(docs[i], *prepared.target, backends, options);
        } catch (...) {
          err = std::current_exception();
        }
      }
      {
        std::lock_guard lock(mu);
        slots[i] = std::move(report);
        errors[i] = err;
        ready[i] = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> threads;
  const size_t n_threads = std::min(jobs, docs.size());
  if (n_threads > 1) {
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(work);
  }
  std::exception_ptr first_error;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (n_threads <= 1) {
      work();  // single-threaded: fills every slot in order
    }
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return ready[i]; });
    if (errors[i]) {
      first_error = errors[i];
      next.store(docs.size());
      break;
    }
    const bool resumed = resume.done.contains({prepared.seed, docs[i].doc_id});
    MembershipReport report = std::move(*slots[i]);
    lock.unlock();
    emit(std::move(report), resumed);
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

ordered_json MetricsFileJson(const ExperimentConfig& cfg,
                             const ExperimentResult& result) {
  ordered_json j = MetricsToJson(result.mean);
  j["config_hash"] = cfg.Hash();
  j["n_seeds"] = result.seeds.size();
  ordered_json per_seed = ordered_json::array();
  for (const auto& s : result.seeds) {
    ordered_json row;
    row["seed"] = s.seed;
    const ordered_json m = MetricsToJson(s.metrics);
    for (auto it = m.begin(); it != m.end(); ++it) row[it.key()] = it.value();
    row["calibration"] = CalibrationToJson(s.calibration);
    row["n_eval_member"] = s.evaluation.member_scores.size();
    row["n_eval_non_member"] = s.evaluation.non_member_scores.size();
    row["n_invalid"] = s.n_invalid;
    per_seed.push_back(std::move(row));
  }
  j["per_seed"] = std::move(per_seed);
  return j;
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const ExperimentBackends& backends,
                               const RunOptions& options) {
  cfg.Validate();
  if (options.jobs < 1) throw InvalidArgument("jobs must be >= 1");
  const auto t_start = std::chrono::steady_clock::now();
  const std::string started_at = NowUtc();
  const bool write = !options.out_dir.empty();
  const auto reports_path = options.out_dir / "reports.jsonl";
  ResumeState resume;
  if (write) {
    std::filesystem::create_directories(options.out_dir);
    const auto config_path = options.out_dir / "config.json";
    const std::string config_text = cfg.ToJson().dump(2) + "\n";
    if (options.resume && std::filesystem::exists(config_path)) {
      if (io::ReadFile(config_path) != config_text) {
        throw InvalidArgument("cannot resume: " + config_path.string() +
                              " differs from the current configuration");
      }
      resume = LoadResumeState(reports_path);
    } else {
      io::WriteFileAtomic(config_path, config_text);
      std::filesystem::remove(reports_path);
    }
  }

  std::unique_ptr<QueryCache> cache;
  if (!cfg.query_cache.empty()) {
    cache = std::make_unique<QueryCache>(cfg.query_cache, cfg.query_fixture);
  }
  AttackBackends attack_backends{backends.query_gen, backends.nli, backends.embed};
  if (cfg.query_fixture) attack_backends.query_gen = nullptr;

  ExperimentResult result;
  std::string invalid_message;
  bool transport_only = true;
  for (int64_t seed : cfg.seeds) {
    const auto t_seed = std::chrono::steady_clock::now();
    PreparedSeed prepared = PrepareSeed(cfg, backends, seed);
    AttackOptions opts;
    opts.budget = cfg.budget;
    opts.min_entailed = cfg.min_entailed;
    opts.scoring = cfg.scoring;
    opts.seed = seed;
    opts.cache = cache.get();

    SeedResult sr;
    sr.seed = seed;
    AttackAll(prepared, attack_backends, opts, options.jobs, resume,
              [&](MembershipReport report, bool resumed) {
                if (write && !resumed) {
                  io::AppendLine(reports_path, ReportToJson(report).dump());
                }
                sr.reports.push_back(std::move(report));
              });
    for (const auto& r : sr.reports) {
      if (r.valid) continue;
      ++sr.n_invalid;
      for (const auto& q : r.queries) {
        if (!q.error.empty() && q.error_code != ErrorCode::kTransport) {
          transport_only = false;
        }
      }
    }
    const double invalid_fraction =
        static_cast<double>(sr.n_invalid) / static_cast<double>(sr.reports.size());
    if (invalid_fraction > kMaxInvalidFraction) {
      std::string first_reason;
      for (const auto& r : sr.reports) {
        if (!r.valid) {
          first_reason = r.doc_id + ": " + r.invalid_reason;
          break;
        }
      }
      invalid_message = "seed " + std::to_string(seed) + ": " +
                        std::to_string(sr.n_invalid) + " of " +
                        std::to_string(sr.reports.size()) +
                        " reports invalid (first: " + first_reason + ")";
      break;
    }
    EvaluateReports(sr, cfg.calibration_fraction);
    sr.seconds = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t_seed)
                     .count();
    result.seeds.push_back(std::move(sr));
  }

  const double total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  if (write) {
    ordered_json manifest;
    manifest["status"] = invalid_message.empty() ? "complete" : "invalid";
    manifest["config_hash"] = cfg.Hash();
    manifest["config"] = cfg.ToJson();
    manifest["seeds"] = cfg.seeds;
    manifest["backends"] = backends.Identities();
    std::string assets;
    for (auto a : {prompts::RagSystem(), prompts::RagUser(),
                   prompts::InstructionDefenseSystem(), prompts::Paraphrase(),
                   prompts::QueryGeneration(), prompts::Summary(),
                   prompts::LlmDetector()}) {
      assets += a;
      assets += '\0';
    }
    for (const auto& h : prompts::RefusalHypotheses()) assets += h + '\n';
    manifest["prompt_assets"] = {{"version", prompts::kAssetVersion},
                                 {"sha256", io::Sha256Hex(assets)}};
    ordered_json per_seed = ordered_json::array();
    for (const auto& s : result.seeds) per_seed.push_back(s.seconds);
    manifest["timings"] = {{"started_at", started_at},
                           {"finished_at", NowUtc()},
                           {"total_seconds", total_seconds},
                           {"per_seed_seconds", per_seed}};
    if (!invalid_message.empty()) manifest["invalid_reason"] = invalid_message;

    if (invalid_message.empty()) {
      result.mean = [&] {
        std::vector<MetricsRow> rows;
        for (const auto& s : result.seeds) rows.push_back(s.metrics);
        return MeanMetrics(rows);
      }();
      // Rewrite with decisions stamped after calibration.
      std::string lines;
      ScoredPopulation all;
      for (const auto& s : result.seeds) {
        for (const auto& r : s.reports) lines += ReportToJson(r).dump() + "\n";
        all.member_scores.insert(all.member_scores.end(),
                                 s.all_scores.member_scores.begin(),
                                 s.all_scores.member_scores.end());
        all.non_member_scores.insert(all.non_member_scores.end(),
                                     s.all_scores.non_member_scores.begin(),
                                     s.all_scores.non_member_scores.end());
      }
      io::WriteFileAtomic(reports_path, lines);
      io::WriteFileAtomic(options.out_dir / "metrics.json",
                          MetricsFileJson(cfg, result).dump(2) + "\n");
      io::WriteFileAtomic(options.out_dir / "histogram.csv",
                          HistogramCsv(ScoreHistogram(all)));
    }
    io::WriteFileAtomic(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
  }
  if (!invalid_message.empty()) {
    if (transport_only) throw Error::Transport(invalid_message, 0);
    throw Error(ErrorCode::kRunInvalid, invalid_message);
  }
  if (!write) {
    std::vector<MetricsRow> rows;
    for (const auto& s : result.seeds) rows.push_back(s.metrics);
    result.mean = MeanMetrics(rows);
  }
  return result;
}

}  // namespace menta
