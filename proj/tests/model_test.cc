// Copyright 2026 The RedForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "redforge/error.h"
#include "redforge/ids.h"
#include "redforge/log.h"
#include "redforge/model.h"
#include "redforge/rng.h"
#include "support/oracles.h"

namespace redforge {
namespace {

TEST(SplitMix64Test, MatchesPublishedSequenceForSeedZero) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.Next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.Next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.Next(), 0x06c45d188009454fULL);
}

TEST(SplitMix64Test, BelowStaysInRangeAndCoversIt) {
  SplitMix64 rng(42);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const uint64_t v = rng.Below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) {
    EXPECT_GT(c, 9000);
    EXPECT_LT(c, 11000);
  }
}

TEST(Fnv1aTest, KnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(DeriveSeedTest, StreamsDiffer) {
  std::set<uint64_t> seen;
  for (uint64_t s = 0; s < 1000; ++s) seen.insert(DeriveSeed(7, s));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(DeriveSeed(7, 3), DeriveSeed(7, 3));
}

TEST(DeterministicShuffleTest, IsAPermutationAndReproducible) {
  std::vector<int> base(50);
  for (int i = 0; i < 50; ++i) base[i] = i;
  auto a = base;
  auto b = base;
  SplitMix64 r1(9), r2(9);
  DeterministicShuffle(a, r1);
  DeterministicShuffle(b, r2);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, base);
  std::sort(a.begin(), a.end());
  EXPECT_EQ(a, base);
}

TEST(IdsTest, WellFormedAndUniqueAcrossThreads) {
  std::vector<std::vector<std::string>> per_thread(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25000; ++i) per_thread[t].push_back(NewId());
    });
  }
  for (auto& t : threads) t.join();
  std::set<std::string> all;
  for (const auto& v : per_thread) {
    for (const auto& id : v) {
      ASSERT_TRUE(IsWellFormedId(id)) << id;
      all.insert(id);
    }
  }
  EXPECT_EQ(all.size(), 100000u);
  EXPECT_FALSE(IsWellFormedId("ABC"));
  EXPECT_FALSE(IsWellFormedId(std::string(32, 'g')));
}

TEST(TimestampTest, FormatsAndParsesMilliseconds) {
  const Timestamp ts = ParseTimestamp("2026-10-15T08:30:00.123Z");
  EXPECT_EQ(FormatTimestamp(ts), "2026-10-15T08:30:00.123Z");
  const Timestamp now = NowUtc();
  EXPECT_EQ(FormatTimestamp(ParseTimestamp(FormatTimestamp(now))), FormatTimestamp(now));
  EXPECT_THROW(ParseTimestamp("yesterday"), Error);
}

Conversation SampleConversation() {
  Conversation c;
  c.id = "c1";
  c.target_id = "t1";
  c.labels = {{"plan_index", "0"}};
  for (int i = 0; i < 3; ++i) {
    PromptRequest req;
    req.id = "r" + std::to_string(i);
    req.conversation_id = "c1";
    req.turn_index = i;
    req.content = "prompt \"" + std::to_string(i) + "\"\n\t\xc3\xa9";
    req.metadata = {{"source_prompt_index", "4"}};
    PromptResponse resp;
    resp.request_id = req.id;
    resp.content = "reply";
    resp.completion_tokens = 1;
    resp.prompt_tokens = 3;
    resp.latency_ms = 12;
    c.turns.push_back({req, i == 2 ? std::nullopt : std::optional<PromptResponse>(resp)});
  }
  return c;
}

TEST(ModelJsonTest, ConversationRoundTrips) {
  const Conversation c = SampleConversation();
  EXPECT_TRUE(ConversationViolations(c).empty());
  const Json j = c;
  EXPECT_EQ(j.get<Conversation>(), c);
  EXPECT_EQ(Json::parse(j.dump()).get<Conversation>(), c);
}

TEST(ModelJsonTest, ConversationViolationsAreReported) {
  Conversation c = SampleConversation();
  c.turns[1].request.turn_index = 5;
  EXPECT_FALSE(ConversationViolations(c).empty());
  c = SampleConversation();
  c.turns[0].response.reset();
  EXPECT_FALSE(ConversationViolations(c).empty());
  c = SampleConversation();
  c.turns[0].request.content.clear();
  EXPECT_FALSE(ConversationViolations(c).empty());
}

TEST(ModelJsonTest, ScoreRecordRoundTripsEveryValueKind) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    ScoreRecord r;
    r.id = NewId();
    r.conversation_id = NewId();
    r.scorer_id = "s";
    r.target_id = "t";
    switch (i % 3) {
      case 0:
        r.value = (i % 2) == 0;
        break;
      case 1:
        r.value = unit(rng);
        r.rationale = "because";
        break;
      default:
        r.value = std::string("label");
        break;
    }
    if (i % 4 == 0) {
      r.correct = i % 8 == 0;
      r.category = kAllCategories[i % 4 == 0 ? (i / 4) % 4 : 0];
      r.answer = "B";
      r.scenario_id = "scn";
      r.item_index = i % 4;
      r.trial = i % 3;
    }
    r.completion_tokens = i;
    const Json j = r;
    ASSERT_EQ(Json::parse(j.dump()).get<ScoreRecord>(), r) << j.dump();
  }
}

TEST(ModelJsonTest, MetricReportRoundTripsWithNullConsistency) {
  MetricReport m = testing::HandFixtureExpected();
  Json j = m;
  EXPECT_EQ(Json::parse(j.dump()).get<MetricReport>(), m);
  m.consistency.reset();
  m.tokens_per_incorrect.reset();
  j = m;
  EXPECT_TRUE(j.at("consistency").is_null());
  EXPECT_EQ(Json::parse(j.dump()).get<MetricReport>(), m);
}

TEST(ModelJsonTest, TargetSpecOmitsFieldsOfTheOtherKind) {
  TargetSpec mock;
  mock.id = "m";
  mock.kind = TargetKind::kMock;
  mock.profile.refusal_keywords = {"bomb"};
  mock.profile.answer_keys = {{"abc", "A"}};
  Json j = mock;
  EXPECT_FALSE(j.contains("endpoint_url"));
  EXPECT_FALSE(j.contains("credential_ref"));
  EXPECT_FALSE(j.at("profile").contains("answer_keys"));
  TargetSpec back = j.get<TargetSpec>();
  EXPECT_TRUE(back.profile.answer_keys.empty());
  back.profile.answer_keys = mock.profile.answer_keys;
  EXPECT_EQ(back, mock);

  TargetSpec http;
  http.id = "h";
  http.kind = TargetKind::kHttpChat;
  http.endpoint_url = "https://example.com/v1/chat/completions";
  http.credential_ref = "API_KEY";
  j = http;
  EXPECT_FALSE(j.contains("profile"));
  EXPECT_EQ(j.get<TargetSpec>(), http);
}

TEST(ModelJsonTest, CampaignRoundTripsForEachOrchestrator) {
  CampaignConfig c;
  c.id = "c";
  c.target_ids = {"a"};
  c.dataset.prompts = {"p"};
  c.converter_chains = {{"chain", {{ConverterKind::kRot13, {}}, {ConverterKind::kPrefixInject, {{"text", "x"}}}}}};
  c.scorers = {{"s", ScorerKind::kKeyword, {"k"}, {}, "", "", true}};
  c.seed = 99;
  c.max_concurrency = 3;
  for (OrchestratorSpec o : {OrchestratorSpec{SweepParams{}},
                             OrchestratorSpec{AdaptiveParams{"g", "a", "d", "s", 4}},
                             OrchestratorSpec{BenchmarkParams{7, 2, "lib.jsonl", 2, "p"}}}) {
    c.orchestrator = o;
    const Json j = c;
    EXPECT_EQ(Json::parse(j.dump()).get<CampaignConfig>(), c) << j.dump();
  }
}

TEST(ModelJsonTest, EnumParsersRejectUnknownNames) {
  EXPECT_EQ(ParseMcqCategory("TeamRisk"), McqCategory::kTeamRisk);
  EXPECT_EQ(ParseRunStatus("cancelled"), RunStatus::kCancelled);
  try {
    ParseConverterKind("rot47");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(RunStatusTest, TerminalStates) {
  EXPECT_FALSE(IsTerminal(RunStatus::kPending));
  EXPECT_FALSE(IsTerminal(RunStatus::kRunning));
  EXPECT_TRUE(IsTerminal(RunStatus::kCompleted));
  EXPECT_TRUE(IsTerminal(RunStatus::kFailed));
  EXPECT_TRUE(IsTerminal(RunStatus::kCancelled));
}

TEST(LogTest, LineIsSingleLineJsonWithFlattenedFields) {
  LogEvent e = MakeEvent(LogLevel::kWarn, "store", "line one\nline two",
                         {{"run_id", "r1"}, {"file", "scores"}});
  const std::string line = FormatLogLine(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const Json j = Json::parse(line);
  EXPECT_EQ(j.at("level"), "WARN");
  EXPECT_EQ(j.at("component"), "store");
  EXPECT_EQ(j.at("msg"), "line one\nline two");
  EXPECT_EQ(j.at("run_id"), "r1");
  EXPECT_EQ(j.at("ts").get<std::string>().size(), 24u);
}

TEST(LogTest, AuditEventsAlwaysCarryAnActor) {
  MemoryLogSink sink;
  sink.Emit(MakeEvent(LogLevel::kAudit, "gateway", "no actor"));
  sink.Emit(MakeEvent(LogLevel::kAudit, "gateway", "actor", {{"actor", "tok1"}}));
  const auto events = sink.events();
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].fields.at("actor"), "system");
  EXPECT_EQ(events[1].fields.at("actor"), "tok1");
}

TEST(LogTest, MemorySinkFiltersByLevel) {
  MemoryLogSink sink(LogLevel::kWarn);
  sink.Emit(MakeEvent(LogLevel::kInfo, "x", "dropped"));
  sink.Emit(MakeEvent(LogLevel::kError, "x", "kept"));
  ASSERT_EQ(sink.events().size(), 1u);
  EXPECT_EQ(sink.events()[0].message, "kept");
}

TEST(LogTest, FileSinkWritesEveryAcceptedEvent) {
  testing::TempDir dir;
  const auto path = dir.path() / "events";
  {
    FileLogSink sink(path, {LogLevel::kDebug, false, 100000});
    for (int i = 0; i < 1000; ++i) {
      ASSERT_TRUE(sink.Emit(MakeEvent(LogLevel::kInfo, "t", "event " + std::to_string(i))));
    }
    sink.Flush();
    EXPECT_EQ(sink.dropped(), 0u);
  }
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(Json::parse(line).at("msg"), "event " + std::to_string(n));
    ++n;
  }
  EXPECT_EQ(n, 1000);
}

TEST(LogTest, FileSinkDropsAndCountsWhenTheBufferIsFull) {
  testing::TempDir dir;
  FileLogSink sink(dir.path() / "events", {LogLevel::kDebug, false, 1});
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    if (sink.Emit(MakeEvent(LogLevel::kInfo, "t", "flood"))) ++accepted;
  }
  sink.Flush();
  EXPECT_EQ(static_cast<uint64_t>(accepted) + sink.dropped(), 20000u);
  EXPECT_GT(sink.dropped(), 0u);
}

}  // namespace
}  // namespace redforge
