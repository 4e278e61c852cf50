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

// Append-only run store. Layout per run:
//
//   <root>/<run_id>/manifest       header record, then status snapshots
//   <root>/<run_id>/conversations  one Conversation per line
//   <root>/<run_id>/scores         one ScoreRecord per line
//   <root>/<run_id>/scenarios      one Scenario per line (benchmarks)
//   <root>/<run_id>/events         structured log lines
//
// Every file is line-delimited JSON and only ever appended to.

#ifndef REDFORGE_RUN_STORE_H_
#define REDFORGE_RUN_STORE_H_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "redforge/log.h"
#include "redforge/model.h"

namespace redforge {

inline constexpr const char* kManifestFile = "manifest";
inline constexpr const char* kConversationsFile = "conversations";
inline constexpr const char* kScoresFile = "scores";
inline constexpr const char* kScenariosFile = "scenarios";
inline constexpr const char* kEventsFile = "events";

// Conversations with this label set to "true" are supporting records (for
// example the attacker side of an adaptive run) and are not counted.
inline constexpr const char* kAuxiliaryLabel = "auxiliary";
// Present on conversations whose target call failed.
inline constexpr const char* kErrorLabel = "error";

struct ScoreFilter {
  std::optional<std::string> target_id;
  std::optional<McqCategory> category;
  std::optional<bool> correct;
  std::optional<std::string> scorer_id;
};

// Conjunction of the set filters, preserving input order.
std::vector<ScoreRecord> Query(std::span<const ScoreRecord> records, const ScoreFilter& filter);

struct LoadWarning {
  std::string file;
  uint64_t byte_offset = 0;
  std::string message;
};

struct LoadedRun {
  RunRecord record;
  CampaignConfig campaign;
  std::vector<Conversation> conversations;
  std::vector<ScoreRecord> scores;
  std::vector<Scenario> scenarios;
  std::vector<LogEvent> events;
  std::vector<LoadWarning> warnings;

  std::vector<ScoreRecord> Query(const ScoreFilter& filter) const {
    return redforge::Query(scores, filter);
  }
};

// Serialized appends to one log file.
class AppendLog {
 public:
  explicit AppendLog(const std::filesystem::path& path);
  ~AppendLog();

  AppendLog(const AppendLog&) = delete;
  AppendLog& operator=(const AppendLog&) = delete;

  // Writes `record` plus newline and flushes before returning.
  void Append(const Json& record);

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::FILE* file_ = nullptr;
};

class RunHandle {
 public:
  RunHandle(std::filesystem::path dir, RunRecord initial);

  const std::string& run_id() const { return run_id_; }
  const std::filesystem::path& dir() const { return dir_; }

  // All appends throw Error(kInvalidState) once a terminal status has been
  // written, and Error(kStorage) when the write fails.
  void AppendConversation(const Conversation& conversation);
  void AppendScore(const ScoreRecord& record);
  void AppendScenario(const Scenario& scenario);
  // Appends a status snapshot to the manifest.
  void WriteStatus(const RunRecord& record);

  RunRecord last_status() const;
  std::shared_ptr<LogSink> events() const { return events_; }

 private:
  void CheckWritable() const;

  std::filesystem::path dir_;
  std::string run_id_;
  mutable std::mutex mu_;
  RunRecord status_;
  AppendLog manifest_;
  AppendLog conversations_;
  AppendLog scores_;
  AppendLog scenarios_;
  std::shared_ptr<LogSink> events_;
};

class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Creates the run directory with a manifest (config snapshot, status
  // pending) and empty logs. `forced_id` exists for tests and imports.
  std::shared_ptr<RunHandle> OpenRun(const CampaignConfig& campaign,
                                     std::optional<std::string> forced_id = std::nullopt,
                                     int64_t conversations_total = 0);

  // Replays every log. A truncated final line is skipped with a warning;
  // any other unparseable line throws CorruptionError. Counters are
  // recomputed from the logs and win over the manifest (WARN to `log`).
  LoadedRun LoadRun(const std::string& run_id, LogSink* log = nullptr) const;

  bool Exists(const std::string& run_id) const;

  // Last manifest status of every run, sorted by run id.
  std::vector<RunRecord> ListRuns() const;

 private:
  std::filesystem::path root_;
};

}  // namespace redforge

#endif  // REDFORGE_RUN_STORE_H_
