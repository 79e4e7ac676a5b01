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

#include <gtest/gtest.h>

#include <cmath>

#include "menta/backends.h"
#include "menta/error.h"
#include "menta/mock_backends.h"
#include "menta/prompts.h"
#include "menta/rag_target.h"

namespace menta {
namespace {

ChatRequest UserRequest(std::string content, int max_tokens = 100) {
  ChatRequest req;
  req.messages = {{Role::kUser, std::move(content)}};
  req.max_output_tokens = max_tokens;
  return req;
}

TEST(MockChatTest, EchoesUnknownPrompts) {
  MockChatBackend chat;
  EXPECT_NE(chat.Chat(UserRequest("ping")).text.find("ping"), std::string::npos);
}

TEST(MockChatTest, OutputCapped) {
  MockChatBackend chat;
  const auto resp = chat.Chat(UserRequest(std::string(200, 'z') + " more words", 1));
  EXPECT_LE(resp.output_tokens, 1);
}

TEST(MockChatTest, InputTokensFromCharacters) {
  MockChatBackend chat;
  EXPECT_EQ(chat.Chat(UserRequest("abcdefghi")).input_tokens, 3);
}

TEST(MockChatTest, RejectsInvalidRequests) {
  MockChatBackend chat;
  EXPECT_THROW(chat.Chat(ChatRequest{}), Error);
  EXPECT_THROW(chat.Chat(UserRequest("x", 0)), Error);
}

TEST(MockChatTest, AnswersRagPrompts) {
  MockChatBackend chat;
  const std::vector<std::string> ctx = {
      "Zebra stripes are unique. Lions roar loudly at dusk.",
      "Penguins waddle across frozen beaches."};
  ChatRequest req;
  req.messages = {{Role::kSystem, std::string(prompts::RagSystem())},
                  {Role::kUser, prompts::Render(prompts::RagUser(),
                                                {{"context", FormatContexts(ctx)},
                                                 {"query", "Do penguins waddle across frozen beaches?"}})}};
  EXPECT_EQ(chat.Chat(req).text, "Penguins waddle across frozen beaches.");
}

TEST(MockChatTest, GeneratesParsableQueryLists) {
  MockChatBackend chat;
  const std::string doc = "Alpha beta gamma delta. Epsilon zeta eta theta.";
  const auto reply = chat.Chat(UserRequest(prompts::Render(
      prompts::QueryGeneration(), {{"num_queries", "3"}, {"target_document", doc}}), 400)).text;
  EXPECT_NE(reply.find("QUERY_1: "), std::string::npos);
  EXPECT_NE(reply.find("QUERY_3: "), std::string::npos);
  EXPECT_EQ(reply.find("QUERY_4: "), std::string::npos);
}

TEST(MockSummaryTest, FirstSentenceOfFirstLine) {
  EXPECT_EQ(MockSummary("One thing here. Two things.\nNext line."),
            "One thing here.");
}

TEST(MockParaphraseTest, DeterministicPerSeed) {
  EXPECT_EQ(MockParaphrase("What is the role of X?", 4),
            MockParaphrase("What is the role of X?", 4));
  EXPECT_EQ(MockParaphrase("What is it?", 0), "Which was it?");
}

TEST(MockDetectorTest, LongQueriesFlagged) {
  EXPECT_EQ(MockDetectorReply("hello there"), "No");
  EXPECT_EQ(MockDetectorReply(
                "alpha beta gamma delta epsilon zeta theta iota kappa lambda"),
            "Yes");
}

TEST(MockNliTest, ContainedHypothesisEntailed) {
  MockNliBackend nli;
  // Ratio r = 1: p_ent = 1 after normalization.
  const auto v = nli.Nli("red apples grow on tall trees", "apples grow on trees");
  EXPECT_DOUBLE_EQ(v.p_ent, 1.0);
  EXPECT_GT(v.p_ent, std::max(v.p_neu, v.p_con));
  EXPECT_TRUE(v.Entailed());
}

TEST(MockNliTest, DisjointVocabularyGivesZero) {
  MockNliBackend nli;
  const auto v = nli.Nli("red apples grow", "blue whales swim");
  EXPECT_DOUBLE_EQ(v.p_ent, 0.0);
  EXPECT_FALSE(v.Entailed());
  EXPECT_NEAR(v.p_ent + v.p_neu + v.p_con, 1.0, 1e-12);
}

TEST(MockNliTest, PartialOverlap) {
  MockNliBackend nli;
  // 1 of 2 content tokens: r = 0.5, con = 0.05, neu = 0.45.
  const auto v = nli.Nli("apples grow", "apples fly");
  EXPECT_NEAR(v.p_ent, 0.5, 1e-12);
  EXPECT_NEAR(v.p_con, 0.05, 1e-12);
  EXPECT_NEAR(v.p_neu, 0.45, 1e-12);
}

TEST(MockNliTest, BatchMatchesSingleCalls) {
  MockNliBackend nli;
  const std::vector<std::string> hyps = {"apples grow", "pears fall", "apples fall"};
  const auto batch = nli.NliBatch("apples grow and fall", hyps);
  ASSERT_EQ(batch.size(), 3u);
  for (size_t i = 0; i < hyps.size(); ++i) {
    EXPECT_DOUBLE_EQ(batch[i].p_ent, nli.Nli("apples grow and fall", hyps[i]).p_ent);
  }
}

TEST(MockNliTest, EmptyHypothesisNamesIndex) {
  MockNliBackend nli;
  try {
    nli.NliBatch("premise", {"a b", "c d", ""});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(VerdictTest, StrictMaxRule) {
  EXPECT_TRUE((NliVerdict{0.7, 0.2, 0.1}).Entailed());
  EXPECT_FALSE((NliVerdict{1.0 / 3, 1.0 / 3, 1.0 / 3}).Entailed());
  EXPECT_FALSE((NliVerdict{0.4, 0.4, 0.2}).Entailed());
}

TEST(VerdictTest, SimplexValidation) {
  EXPECT_NO_THROW(ValidateVerdict({0.5, 0.25, 0.25}));
  EXPECT_THROW(ValidateVerdict({0.5, 0.5, 0.5}), Error);
  EXPECT_THROW(ValidateVerdict({-0.1, 0.6, 0.5}), Error);
}

TEST(MockEmbedTest, DeterministicUnitVectors) {
  MockEmbedBackend embed;
  EXPECT_EQ(embed.dim(), 256u);
  const auto a = embed.Embed("glacier melt rates");
  const auto b = embed.Embed("glacier melt rates");
  EXPECT_EQ(a.values, b.values);
  EXPECT_NEAR(Dot(a, a), 1.0, 1e-12);
  EXPECT_NEAR(Cosine(a, b), 1.0, 1e-12);
  EXPECT_THROW(embed.Embed(""), Error);
}

}  // namespace
}  // namespace menta
