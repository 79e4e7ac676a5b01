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

#include "menta/detectors.h"

#include <gtest/gtest.h>

#include <filesystem>

#include "menta/error.h"
#include "menta/mock_backends.h"

namespace menta {
namespace {

class ReplyChat : public ChatBackend {
 public:
  explicit ReplyChat(std::string reply) : reply_(std::move(reply)) {}
  ChatResponse Chat(const ChatRequest& req) const override {
    last_max_tokens = req.max_output_tokens;
    return {reply_, 1, 1};
  }
  std::string Identity() const override { return "reply"; }
  mutable int last_max_tokens = 0;

 private:
  std::string reply_;
};

struct DenseCorpus {
  std::shared_ptr<MockEmbedBackend> embed = std::make_shared<MockEmbedBackend>();
  std::vector<Document> docs = SynthCorpus(30, 0, 4, 12).docs;
  RetrievalIndex index = RetrievalIndex::Build(docs, RetrieverKind::kDense, embed);

  // A word whose hash bucket no indexed document touches: every cosine is 0.
  std::string UnrelatedWord() const {
    for (int i = 0;; ++i) {
      const std::string w = "nonce" + std::to_string(i);
      const auto v = embed->Embed(w);
      size_t bucket = 0;
      while (v.values[bucket] == 0.0) ++bucket;
      bool unused = true;
      for (const auto& e : index.entries()) unused &= e.vector.values[bucket] == 0.0;
      if (unused) return w;
    }
  }
};

TEST(SpikeDetectorTest, VerbatimDocumentFlagged) {
  DenseCorpus c;
  const auto v = SimilaritySpikeDetect(c.docs[3].text, c.index);
  EXPECT_TRUE(v.flagged);
  EXPECT_GT(v.statistic, 3.0);
  ASSERT_TRUE(v.p_value.has_value());
  EXPECT_LT(*v.p_value, 0.05);
}

TEST(SpikeDetectorTest, HandComputedStatistic) {
  DenseCorpus c;
  const std::string q = c.docs[0].text;
  auto sims = c.index.ScoreAll(q);
  std::sort(sims.begin(), sims.end(), std::greater<>());
  double mean = 0.0;
  for (int i = 1; i <= 10; ++i) mean += sims[i];
  mean /= 10.0;
  double ss = 0.0;
  for (int i = 1; i <= 10; ++i) ss += (sims[i] - mean) * (sims[i] - mean);
  const double z = (sims[0] - mean) / std::sqrt(ss / 9.0);
  const auto v = SimilaritySpikeDetect(q, c.index);
  EXPECT_NEAR(v.statistic, z, 1e-12);
  EXPECT_NEAR(*v.p_value, 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-15);
}

TEST(SpikeDetectorTest, UniformSimilarityPasses) {
  DenseCorpus c;
  const auto v = SimilaritySpikeDetect(c.UnrelatedWord(), c.index);
  EXPECT_FALSE(v.flagged);
  EXPECT_EQ(v.statistic, 0.0);
}

TEST(SpikeDetectorTest, RhoZeroNeverFlags) {
  DenseCorpus c;
  EXPECT_FALSE(SimilaritySpikeDetect(c.docs[3].text, c.index, 0.0).flagged);
}

TEST(SpikeDetectorTest, Preconditions) {
  DenseCorpus c;
  EXPECT_THROW(SimilaritySpikeDetect("q", c.index, 1.5), Error);
  const auto small = RetrievalIndex::Build(
      std::vector<Document>(c.docs.begin(), c.docs.begin() + 5), RetrieverKind::kDense,
      c.embed);
  EXPECT_THROW(SimilaritySpikeDetect("q", small), Error);
  const auto bm25 = RetrievalIndex::Build(c.docs, RetrieverKind::kBm25);
  EXPECT_THROW(SimilaritySpikeDetect("q", bm25), Error);
}

TEST(LlmDetectorTest, ParsesReplies) {
  ReplyChat yes("Yes, it is.");
  EXPECT_TRUE(LlmDetect("q", yes).flagged);
  EXPECT_EQ(yes.last_max_tokens, 5);
  const auto no = LlmDetect("q", ReplyChat("No."));
  EXPECT_FALSE(no.flagged);
  EXPECT_FALSE(no.parse_warning);
  const auto maybe = LlmDetect("q", ReplyChat("Maybe"));
  EXPECT_FALSE(maybe.flagged);
  EXPECT_TRUE(maybe.parse_warning);
}

Detector FlagIf(std::function<bool(const std::string&)> pred) {
  return [pred](const std::string& q) {
    DetectorVerdict v;
    v.flagged = pred(q);
    return v;
  };
}

TEST(EvaluateDetectorTest, HandCountedSets) {
  const std::vector<std::string> attacks = {"a1", "a2", "x3", "x4"};
  const std::vector<std::string> benign = {"b1", "y2", "y3", "y4"};
  const auto all = EvaluateDetector(FlagIf([](auto&) { return true; }), attacks, benign);
  EXPECT_EQ(all.recall_on_attacks, 1.0);
  EXPECT_EQ(all.fpr_on_benign, 1.0);
  const auto none = EvaluateDetector(FlagIf([](auto&) { return false; }), attacks, benign);
  EXPECT_EQ(none.recall_on_attacks, 0.0);
  EXPECT_EQ(none.fpr_on_benign, 0.0);
  const auto some = EvaluateDetector(
      FlagIf([](const std::string& q) { return q[0] == 'a' || q[0] == 'b'; }), attacks,
      benign);
  EXPECT_EQ(some.recall_on_attacks, 0.5);
  EXPECT_EQ(some.fpr_on_benign, 0.25);
  EXPECT_EQ(some.n_attack, 4u);
  EXPECT_EQ(some.n_benign, 4u);
  EXPECT_THROW(EvaluateDetector(FlagIf([](auto&) { return true; }), {}, benign), Error);
}

TEST(EvaluateDetectorTest, CountsWarnings) {
  const auto r = EvaluateDetector(
      [](const std::string& q) { return LlmDetect(q, ReplyChat("unsure")); }, {"a"}, {"b"});
  EXPECT_EQ(r.n_warnings, 2u);
  EXPECT_EQ(DetectorResultToJson(r)["n_warnings"], 2);
}

TEST(DetectionSetTest, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "menta_detect_set.jsonl";
  const std::vector<LabeledQuery> qs = {{"q1", QueryLabel::kAttack, "entailment"},
                                        {"q2", QueryLabel::kBenign, ""}};
  SaveDetectionSet(path, qs);
  const auto back = LoadDetectionSet(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].query, "q1");
  EXPECT_EQ(back[0].label, QueryLabel::kAttack);
  EXPECT_EQ(back[0].attack_name, "entailment");
  EXPECT_EQ(back[1].label, QueryLabel::kBenign);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace menta
