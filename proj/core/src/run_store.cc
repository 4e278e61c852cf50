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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "redforge/error.h"
#include "redforge/ids.h"

namespace redforge {
namespace {

namespace fs = std::filesystem;

std::string DumpLine(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

// Calls `on_record(json, line_no)` for each parsed line.
template <typename F>
void ReplayFile(const fs::path& path, std::vector<LoadWarning>& warnings, F on_record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "missing run log " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  struct Line {
    uint64_t offset;
    std::string_view text;
  };
  std::vector<Line> lines;
  size_t start = 0;
  while (start < data.size()) {
    size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    lines.push_back({start, std::string_view(data).substr(start, end - start)});
    start = end + 1;
  }
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].text.empty()) continue;
    Json j = Json::parse(lines[i].text, nullptr, false);
    bool ok = !j.is_discarded() && j.is_object();
    if (ok) {
      try {
        on_record(j, i + 1);
      } catch (const Error&) {
        ok = false;
      } catch (const Json::exception&) {
        ok = false;
      }
    }
    if (ok) continue;
    bool is_last = true;
    for (size_t k = i + 1; k < lines.size(); ++k) {
      if (!lines[k].text.empty()) is_last = false;
    }
    if (!is_last) {
      throw CorruptionError(path.filename().string(), i + 1, "unparseable record");
    }
    warnings.push_back({path.filename().string(), lines[i].offset,
                        "skipped truncated final line at byte " +
                            std::to_string(lines[i].offset)});
  }
}

}  // namespace

std::vector<ScoreRecord> Query(std::span<const ScoreRecord> records, const ScoreFilter& filter) {
  std::vector<ScoreRecord> out;
  for (const auto& r : records) {
    if (filter.target_id && r.target_id != *filter.target_id) continue;
    if (filter.scorer_id && r.scorer_id != *filter.scorer_id) continue;
    if (filter.category && r.category != filter.category) continue;
    if (filter.correct && r.correct != filter.correct) continue;
    out.push_back(r);
  }
  return out;
}

AppendLog::AppendLog(const fs::path& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "ab");
  if (file_ == nullptr) throw Error(ErrorCode::kStorage, "cannot open " + path.string());
}

AppendLog::~AppendLog() {
  if (file_ != nullptr) std::fclose(file_);
}

void AppendLog::Append(const Json& record) {
  std::string line = DumpLine(record);
  line.push_back('\n');
  std::lock_guard lock(mu_);
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fflush(file_) != 0) {
    throw Error(ErrorCode::kStorage, "write failed on " + path_.string());
  }
}

RunHandle::RunHandle(fs::path dir, RunRecord initial)
    : dir_(std::move(dir)),
      run_id_(initial.run_id),
      status_(std::move(initial)),
      manifest_(dir_ / kManifestFile),
      conversations_(dir_ / kConversationsFile),
      scores_(dir_ / kScoresFile),
      scenarios_(dir_ / kScenariosFile),
      events_(std::make_shared<FileLogSink>(dir_ / kEventsFile,
                                            FileLogSinkOptions{LogLevel::kDebug, false, 8192})) {}

void RunHandle::CheckWritable() const {
  std::lock_guard lock(mu_);
  if (IsTerminal(status_.status)) {
    throw Error(ErrorCode::kInvalidState,
                "run " + run_id_ + " is " + std::string(ToString(status_.status)));
  }
}

void RunHandle::AppendConversation(const Conversation& conversation) {
  CheckWritable();
  conversations_.Append(conversation);
}

void RunHandle::AppendScore(const ScoreRecord& record) {
  CheckWritable();
  scores_.Append(record);
}

void RunHandle::AppendScenario(const Scenario& scenario) {
  CheckWritable();
  scenarios_.Append(scenario);
}

void RunHandle::WriteStatus(const RunRecord& record) {
  CheckWritable();
  Json j = record;
  j["type"] = "status";
  manifest_.Append(j);
  std::lock_guard lock(mu_);
  status_ = record;
  if (IsTerminal(record.status)) events_->Flush();
}

RunRecord RunHandle::last_status() const {
  std::lock_guard lock(mu_);
  return status_;
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {}

bool RunStore::Exists(const std::string& run_id) const {
  std::error_code ec;
  return !run_id.empty() && run_id != "." && run_id != ".." &&
         run_id.find_first_of("/\\") == std::string::npos &&
         fs::exists(root_ / run_id / kManifestFile, ec);
}

std::shared_ptr<RunHandle> RunStore::OpenRun(const CampaignConfig& campaign,
                                             std::optional<std::string> forced_id,
                                             int64_t conversations_total) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw Error(ErrorCode::kStorage, "run store root " + root_.string() + " is not writable");
  }
  const std::string run_id = forced_id ? *forced_id : NewId();
  const fs::path dir = root_ / run_id;
  if (!fs::create_directory(dir, ec)) {
    if (fs::exists(dir)) throw Error(ErrorCode::kCollision, "run " + run_id + " already exists");
    throw Error(ErrorCode::kStorage, "cannot create " + dir.string() + ": " + ec.message());
  }

  RunRecord initial;
  initial.run_id = run_id;
  initial.campaign_id = campaign.id;
  initial.status = RunStatus::kPending;
  initial.counters.conversations_total = conversations_total;

  {
    AppendLog manifest(dir / kManifestFile);
    manifest.Append(Json{{"type", "header"},
                         {"format", 1},
                         {"run_id", run_id},
                         {"campaign_id", campaign.id},
                         {"created_at", FormatTimestamp(NowUtc())},
                         {"campaign", campaign}});
    Json status = initial;
    status["type"] = "status";
    manifest.Append(status);
  }
  return std::make_shared<RunHandle>(dir, initial);
}

LoadedRun RunStore::LoadRun(const std::string& run_id, LogSink* log) const {
  if (!Exists(run_id)) throw Error(ErrorCode::kNotFound, "run " + run_id + " not found");
  const fs::path dir = root_ / run_id;
  LoadedRun run;
  bool have_header = false;
  bool have_status = false;

  ReplayFile(dir / kManifestFile, run.warnings, [&](const Json& j, size_t) {
    const std::string type = j.value("type", "");
    if (type == "header") {
      run.campaign = j.at("campaign").get<CampaignConfig>();
      have_header = true;
    } else if (type == "status") {
      run.record = j.get<RunRecord>();
      have_status = true;
    } else {
      throw Error(ErrorCode::kParse, "unknown manifest record");
    }
  });
  if (!have_header || !have_status) {
    throw CorruptionError(kManifestFile, 1, "manifest lacks header or status");
  }
  ReplayFile(dir / kConversationsFile, run.warnings, [&](const Json& j, size_t) {
    run.conversations.push_back(j.get<Conversation>());
  });
  ReplayFile(dir / kScoresFile, run.warnings,
             [&](const Json& j, size_t) { run.scores.push_back(j.get<ScoreRecord>()); });
  if (fs::exists(dir / kScenariosFile)) {
    ReplayFile(dir / kScenariosFile, run.warnings,
               [&](const Json& j, size_t) { run.scenarios.push_back(j.get<Scenario>()); });
  }
  if (fs::exists(dir / kEventsFile)) {
    ReplayFile(dir / kEventsFile, run.warnings,
               [&](const Json& j, size_t) { run.events.push_back(j.get<LogEvent>()); });
  }

  RunCounters replayed;
  replayed.conversations_total = run.record.counters.conversations_total;
  for (const auto& c : run.conversations) {
    auto aux = c.labels.find(kAuxiliaryLabel);
    if (aux != c.labels.end() && aux->second == "true") continue;
    ++replayed.conversations_done;
    if (c.labels.contains(kErrorLabel)) ++replayed.errors;
  }
  if (replayed != run.record.counters) {
    if (log != nullptr) {
      log->Emit(MakeEvent(LogLevel::kWarn, "memory-store",
                          "manifest counters differ from replay; using replay",
                          {{"run_id", run_id}}));
    }
    run.record.counters = replayed;
  }
  if (log != nullptr) {
    for (const auto& w : run.warnings) {
      log->Emit(MakeEvent(LogLevel::kWarn, "memory-store", w.message,
                          {{"run_id", run_id},
                           {"file", w.file},
                           {"byte_offset", std::to_string(w.byte_offset)}}));
    }
  }
  return run;
}

std::vector<RunRecord> RunStore::ListRuns() const {
  std::vector<RunRecord> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_, ec)) {
    if (entry.is_directory() && fs::exists(entry.path() / kManifestFile)) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    std::vector<LoadWarning> ignored;
    std::optional<RunRecord> last;
    try {
      ReplayFile(root_ / id / kManifestFile, ignored, [&](const Json& j, size_t) {
        if (j.value("type", "") == "status") last = j.get<RunRecord>();
      });
    } catch (const Error&) {
      continue;
    }
    if (last) out.push_back(*last);
  }
  return out;
}

}  // namespace redforge
