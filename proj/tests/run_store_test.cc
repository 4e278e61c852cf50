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

#include "redforge/run_store.h"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "redforge/error.h"
#include "redforge/ids.h"
#include "support/oracles.h"

namespace redforge {
namespace {

namespace fs = std::filesystem;

CampaignConfig Campaign() {
  CampaignConfig c;
  c.id = "camp";
  c.target_ids = {"t"};
  c.dataset.prompts = {"hello"};
  return c;
}

Conversation Conv(const std::string& id, StringMap labels = {}) {
  Conversation c;
  c.id = id;
  c.target_id = "t";
  PromptRequest req;
  req.id = id + "-req";
  req.conversation_id = id;
  req.content = "hello " + id;
  PromptResponse resp;
  resp.request_id = req.id;
  resp.content = "hi";
  resp.completion_tokens = 1;
  c.turns.push_back({req, resp});
  c.labels = std::move(labels);
  return c;
}

void AppendRaw(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << text;
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

TEST(RunStoreTest, OpenWritesManifestAndEmptyLogs) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "run-1", 5);
  EXPECT_EQ(h->run_id(), "run-1");
  for (const char* f : {kManifestFile, kConversationsFile, kScoresFile}) {
    EXPECT_TRUE(fs::exists(dir.path() / "run-1" / f)) << f;
  }
  LoadedRun run = store.LoadRun("run-1");
  EXPECT_EQ(run.campaign, Campaign());
  EXPECT_EQ(run.record.status, RunStatus::kPending);
  EXPECT_EQ(run.record.counters.conversations_total, 5);
  EXPECT_TRUE(run.warnings.empty());
}

TEST(RunStoreTest, RoundTripsEveryRecordKind) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r");
  std::vector<Conversation> convs = {Conv("a"), Conv("b", {{kErrorLabel, "boom"}}),
                                     Conv("c", {{kAuxiliaryLabel, "true"}})};
  for (const auto& c : convs) h->AppendConversation(c);
  auto scores = testing::HandFixtureRecords();
  for (const auto& s : scores) h->AppendScore(s);
  Scenario scn;
  scn.id = "scn-1";
  scn.vignette = "text";
  h->AppendScenario(scn);
  RunRecord done = h->last_status();
  done.status = RunStatus::kCompleted;
  done.counters = {3, 2, 1};
  done.started_at = NowUtc();
  done.ended_at = NowUtc();
  h->WriteStatus(done);

  LoadedRun run = store.LoadRun("r");
  EXPECT_EQ(run.conversations, convs);
  EXPECT_EQ(run.scores, scores);
  ASSERT_EQ(run.scenarios.size(), 1u);
  EXPECT_EQ(run.scenarios[0], scn);
  EXPECT_EQ(run.record, done);
  EXPECT_TRUE(run.warnings.empty());
}

TEST(RunStoreTest, TerminalStatusBlocksAppends) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r");
  RunRecord rec = h->last_status();
  rec.status = RunStatus::kCancelled;
  h->WriteStatus(rec);
  for (auto fn : std::vector<std::function<void()>>{
           [&] { h->AppendConversation(Conv("x")); },
           [&] { h->AppendScore(ScoreRecord{}); },
           [&] { h->AppendScenario(Scenario{}); },
           [&] { h->WriteStatus(rec); }}) {
    try {
      fn();
      ADD_FAILURE() << "append after terminal status succeeded";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidState);
    }
  }
}

TEST(RunStoreTest, ConcurrentAppendsAreWholeLines) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r", 100);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        h->AppendConversation(Conv("c" + std::to_string(t * 25 + i)));
      }
    });
  }
  for (auto& t : threads) t.join();
  LoadedRun run = store.LoadRun("r");
  ASSERT_EQ(run.conversations.size(), 100u);
  std::set<std::string> ids;
  for (const auto& c : run.conversations) ids.insert(c.id);
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_EQ(run.record.counters.conversations_done, 100);
}

TEST(RunStoreTest, TruncatedFinalLineIsSkippedWithWarning) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r");
  for (int i = 0; i < 10; ++i) h->AppendConversation(Conv("c" + std::to_string(i)));
  h.reset();
  const fs::path file = dir.path() / "r" / kConversationsFile;
  const uint64_t size_before = fs::file_size(file);
  std::string whole = Json(Conv("c10")).dump();
  AppendRaw(file, whole.substr(0, whole.size() / 2));

  MemoryLogSink log;
  LoadedRun run = store.LoadRun("r", &log);
  EXPECT_EQ(run.conversations.size(), 10u);
  ASSERT_EQ(run.warnings.size(), 1u);
  EXPECT_EQ(run.warnings[0].file, kConversationsFile);
  EXPECT_EQ(run.warnings[0].byte_offset, size_before);
  size_t warns = 0;
  for (const auto& e : log.events()) warns += e.level == LogLevel::kWarn;
  // One for the skipped line, one for the counter mismatch (manifest says 0).
  EXPECT_EQ(warns, 2u);
}

TEST(RunStoreTest, MidFileCorruptionThrows) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r");
  h->AppendConversation(Conv("a"));
  h.reset();
  const fs::path file = dir.path() / "r" / kConversationsFile;
  AppendRaw(file, "{garbage\n");
  AppendRaw(file, Json(Conv("b")).dump() + "\n");
  try {
    store.LoadRun("r");
    FAIL() << "expected corruption";
  } catch (const CorruptionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruption);
    EXPECT_EQ(e.file(), kConversationsFile);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RunStoreTest, ReplayedCountersWinOverManifest) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r", 4);
  h->AppendConversation(Conv("a"));
  h->AppendConversation(Conv("b", {{kErrorLabel, "x"}}));
  h->AppendConversation(Conv("aux", {{kAuxiliaryLabel, "true"}}));
  RunRecord rec = h->last_status();
  rec.counters.conversations_done = 9;
  h->WriteStatus(rec);

  MemoryLogSink log;
  LoadedRun run = store.LoadRun("r", &log);
  EXPECT_EQ(run.record.counters, (RunCounters{4, 2, 1}));
  ASSERT_EQ(log.events().size(), 1u);
  EXPECT_EQ(log.events()[0].level, LogLevel::kWarn);

  rec.counters = {4, 2, 1};
  h->WriteStatus(rec);
  MemoryLogSink quiet;
  store.LoadRun("r", &quiet);
  EXPECT_TRUE(quiet.events().empty());
}

TEST(RunStoreTest, CollisionAndMissingRuns) {
  testing::TempDir dir;
  RunStore store(dir.path());
  store.OpenRun(Campaign(), "r");
  try {
    store.OpenRun(Campaign(), "r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCollision);
  }
  for (const std::string id : {"nope", "", ".", "..", "../r", "r/.."}) {
    EXPECT_FALSE(store.Exists(id)) << id;
    try {
      store.LoadRun(id);
      ADD_FAILURE() << id;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    }
  }
  EXPECT_TRUE(store.Exists("r"));
}

TEST(RunStoreTest, UnwritableRootIsStorageError) {
  testing::TempDir dir;
  const fs::path blocker = dir.path() / "file";
  AppendRaw(blocker, "x");
  RunStore store(blocker);
  try {
    store.OpenRun(Campaign());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStorage);
  }
  RunStore nested(blocker / "sub");
  EXPECT_THROW(nested.OpenRun(Campaign()), Error);
}

TEST(RunStoreTest, ListRunsReturnsLastStatusSortedById) {
  testing::TempDir dir;
  RunStore store(dir.path());
  EXPECT_TRUE(RunStore(dir.path() / "absent").ListRuns().empty());
  auto b = store.OpenRun(Campaign(), "b");
  auto a = store.OpenRun(Campaign(), "a");
  RunRecord rec = b->last_status();
  rec.status = RunStatus::kRunning;
  b->WriteStatus(rec);
  fs::create_directory(dir.path() / "stray");
  auto runs = store.ListRuns();
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].run_id, "a");
  EXPECT_EQ(runs[1].run_id, "b");
  EXPECT_EQ(runs[1].status, RunStatus::kRunning);
}

TEST(RunStoreTest, EventsLogReplays) {
  testing::TempDir dir;
  RunStore store(dir.path());
  auto h = store.OpenRun(Campaign(), "r");
  h->events()->Emit(MakeEvent(LogLevel::kInfo, "orchestration", "started", {{"k", "v"}}));
  RunRecord rec = h->last_status();
  rec.status = RunStatus::kCompleted;
  h->WriteStatus(rec);
  LoadedRun run = store.LoadRun("r");
  ASSERT_EQ(run.events.size(), 1u);
  EXPECT_EQ(run.events[0].message, "started");
  EXPECT_EQ(run.events[0].fields.at("k"), "v");
  EXPECT_NE(ReadAll(dir.path() / "r" / kEventsFile).find("\"msg\":\"started\""),
            std::string::npos);
}

// Property: Query equals a brute-force conjunction over random filters.
TEST(QueryTest, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  std::vector<ScoreRecord> records(300);
  for (auto& r : records) {
    r.id = NewId();
    r.target_id = "t" + std::to_string(rng() % 3);
    r.scorer_id = "s" + std::to_string(rng() % 2);
    if (rng() % 4 != 0) {
      r.category = static_cast<McqCategory>(rng() % 4);
      r.correct = rng() % 2 == 0;
    }
  }
  for (int round = 0; round < 500; ++round) {
    ScoreFilter f;
    if (rng() % 2) f.target_id = "t" + std::to_string(rng() % 4);
    if (rng() % 2) f.scorer_id = "s" + std::to_string(rng() % 2);
    if (rng() % 2) f.category = static_cast<McqCategory>(rng() % 4);
    if (rng() % 2) f.correct = rng() % 2 == 0;
    std::vector<ScoreRecord> expected;
    for (const auto& r : records) {
      bool keep = (!f.target_id || r.target_id == *f.target_id) &&
                  (!f.scorer_id || r.scorer_id == *f.scorer_id) &&
                  (!f.category || (r.category && *r.category == *f.category)) &&
                  (!f.correct || (r.correct && *r.correct == *f.correct));
      if (keep) expected.push_back(r);
    }
    EXPECT_EQ(Query(records, f), expected);
  }
}

}  // namespace
}  // namespace redforge
