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

#include "menta/rag_target.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "menta/error.h"
#include "menta/mock_backends.h"
#include "menta/prompts.h"
#include "menta/rng.h"
#include "menta/text.h"

namespace menta {
namespace {

class FixedChat : public ChatBackend {
 public:
  explicit FixedChat(std::string reply) : reply_(std::move(reply)) {}
  ChatResponse Chat(const ChatRequest& req) const override {
    last_system = std::string(req.System());
    return {reply_, 1, 1};
  }
  std::string Identity() const override { return "fixed"; }
  mutable std::string last_system;

 private:
  std::string reply_;
};

std::shared_ptr<const RetrievalIndex> SmallIndex() {
  std::vector<Document> docs = {
      {"d1", "", "The walrus tusk measures ninety centimeters. Walruses rest on ice floes."},
      {"d2", "", "Honeybees dance to signal nectar sources. Hives hold thousands of bees."},
      {"d3", "", "Basalt columns form as lava cools slowly. They are often hexagonal."},
      {"d4", "", "Tidal pools host anemones and small crabs."},
  };
  return std::make_shared<RetrievalIndex>(
      RetrievalIndex::Build(docs, RetrieverKind::kBm25));
}

RagConfig MockConfig(std::vector<DefenseSpec> defenses = {}) {
  RagConfig c;
  c.top_k = 3;
  c.generator = std::make_shared<MockChatBackend>();
  c.index = SmallIndex();
  c.defenses = std::move(defenses);
  return c;
}

TEST(RagTargetTest, AnswersFromMatchingContextSentence) {
  RagTarget target(MockConfig());
  // Every content token of the first d2 sentence is in the query: ratio 1.
  const auto ex = target.AnswerQuery("Why do honeybees dance to signal nectar sources?");
  EXPECT_EQ(ex.answer,
            "Honeybees dance to signal nectar sources. Hives hold thousands of bees.");
  EXPECT_EQ(ex.RetrievedForEvaluation().front().doc_id, "d2");
}

TEST(RagTargetTest, AbstainsWithoutOverlap) {
  RagTarget target(MockConfig());
  EXPECT_EQ(target.AnswerQuery("Who composed symphonies in Vienna?").answer,
            prompts::kIdkAnswer);
}

TEST(RagTargetTest, RejectsBadConfigAndQueries) {
  auto c = MockConfig();
  c.top_k = 0;
  EXPECT_THROW(RagTarget{c}, Error);
  c = MockConfig({DefenseSpec::Dp(0.0)});
  EXPECT_THROW(RagTarget{c}, Error);
  c = MockConfig({{DefenseKind::kRerankShuffle, 0.5, 0}});
  EXPECT_THROW(RagTarget{c}, Error);
  RagTarget ok(MockConfig());
  EXPECT_THROW(ok.AnswerQuery("   "), Error);
}

TEST(RagTargetTest, RerankKeepsSetAndIsDeterministic) {
  RagTarget plain(MockConfig());
  RagTarget shuffled(MockConfig({DefenseSpec::Of(DefenseKind::kRerankShuffle, 5)}));
  const std::string q = "walrus honeybees basalt tidal";
  auto ids = [](const RagExchange& ex) {
    std::vector<std::string> out;
    for (const auto& r : ex.RetrievedForEvaluation()) out.push_back(r.doc_id);
    return out;
  };
  auto a = ids(plain.AnswerQuery(q));
  auto b = ids(shuffled.AnswerQuery(q));
  EXPECT_EQ(b, ids(shuffled.AnswerQuery(q)));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(RagTargetTest, InstructionDefenseSwapsSystemPrompt) {
  auto chat = std::make_shared<FixedChat>("ok");
  auto c = MockConfig({DefenseSpec::Of(DefenseKind::kInstruction)});
  c.generator = chat;
  RagTarget(c).AnswerQuery("walrus");
  EXPECT_EQ(chat->last_system, prompts::InstructionDefenseSystem());
  c.defenses.clear();
  RagTarget(c).AnswerQuery("walrus");
  EXPECT_EQ(chat->last_system, prompts::RagSystem());
}

TEST(RagTargetTest, ParaphraseChangesEffectiveQuery) {
  RagTarget target(MockConfig({DefenseSpec::Of(DefenseKind::kParaphrase, 0)}));
  const auto ex = target.AnswerQuery("What is the walrus tusk?");
  EXPECT_EQ(ex.original_query, "What is the walrus tusk?");
  EXPECT_EQ(ex.effective_query, "Which was the walrus tusk?");
  EXPECT_FALSE(ex.paraphrase_fallback);
}

TEST(RagTargetTest, ParaphraseFallsBackOnEmptyReply) {
  FixedChat empty("  ");
  const auto p = ParaphraseQuery("keep me", empty, 1);
  EXPECT_EQ(p.text, "keep me");
  EXPECT_TRUE(p.fell_back);
  MockChatBackend mock;
  EXPECT_EQ(ParaphraseQuery("what is it", mock, 3).text,
            ParaphraseQuery("what is it", mock, 3).text);
}

TEST(RagTargetTest, GeneratorErrorsNameTheStage) {
  class Broken : public ChatBackend {
   public:
    ChatResponse Chat(const ChatRequest&) const override {
      throw Error::Transport("down", 3);
    }
    std::string Identity() const override { return "broken"; }
  };
  auto c = MockConfig();
  c.generator = std::make_shared<Broken>();
  try {
    RagTarget(c).AnswerQuery("walrus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
    EXPECT_EQ(std::string(e.what()).rfind("generate: ", 0), 0u);
  }
}

TEST(DpTest, LargeEpsilonIsIdentity) {
  const std::string s = "one two three four five six seven eight nine ten";
  EXPECT_LT(DpDropProbability(20.0), 3e-9);
  for (uint64_t seed = 0; seed < 50; ++seed) EXPECT_EQ(DpPerturb(s, 20.0, seed), s);
}

TEST(DpTest, DropProbabilityAtSmallEpsilon) {
  EXPECT_NEAR(DpDropProbability(0.1), 1.0 / (1.0 + std::exp(0.1)), 1e-15);
  EXPECT_NEAR(DpDropProbability(0.1), 0.475, 0.001);
  std::string s;
  for (int i = 0; i < 10000; ++i) s += "w ";
  const auto kept = text::SplitWhitespace(DpPerturb(s, 0.1, 42)).size();
  EXPECT_NEAR(1.0 - kept / 10000.0, 0.475, 0.01);
}

TEST(DpTest, EdgeCases) {
  EXPECT_EQ(DpPerturb("", 0.1, 1), "");
  EXPECT_THROW(DpPerturb("x", 0.0, 1), Error);
  EXPECT_EQ(DpPerturb("a b c d e f", 0.5, 9), DpPerturb("a b c d e f", 0.5, 9));
}

TEST(MockGeneratorTest, VerbatimSentenceReturned) {
  const std::vector<std::string> ctx = {"Owls hunt at night. Mice hide in burrows."};
  EXPECT_EQ(MockGeneratorRule(ctx, "Owls hunt at night."),
            "Owls hunt at night. Mice hide in burrows.");
}

TEST(MockGeneratorTest, NoSharedTokensAbstains) {
  EXPECT_EQ(MockGeneratorRule({"Owls hunt at night."}, "Stock markets fell"),
            "I don't know");
}

TEST(MockGeneratorTest, TiesGoToEarlierSentence) {
  const std::vector<std::string> ctx = {"Trains depart. Clocks tick loudly.",
                                        "Trains depart daily."};
  EXPECT_EQ(MockGeneratorRule(ctx, "trains depart clocks tick daily loudly"),
            "Trains depart. Clocks tick loudly.");
}

TEST(MockGeneratorTest, AnswerSpansAtMostThreeSentences) {
  const std::vector<std::string> ctx = {"Aa bb. Cc dd. Ee ff. Gg hh."};
  EXPECT_EQ(MockGeneratorRule(ctx, "aa bb"), "Aa bb. Cc dd. Ee ff.");
}

TEST(DefenseKindTest, NamesRoundTrip) {
  for (auto k : {DefenseKind::kDpOutput, DefenseKind::kRerankShuffle,
                 DefenseKind::kParaphrase, DefenseKind::kInstruction}) {
    EXPECT_EQ(ParseDefenseKind(DefenseKindName(k)), k);
  }
  EXPECT_THROW(ParseDefenseKind("firewall"), Error);
}

}  // namespace
}  // namespace menta
