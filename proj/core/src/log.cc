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

#include "redforge/log.h"

#include <cstdio>

#include "redforge/error.h"

namespace redforge {
namespace {

void EnsureActor(LogEvent& event) {
  if (event.level == LogLevel::kAudit && !event.fields.contains("actor")) {
    event.fields["actor"] = "system";
  }
}

}  // namespace

std::string FormatLogLine(const LogEvent& event) {
  Json j = event;
  // dump() escapes control characters, so the record stays on one line.
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

LogEvent MakeEvent(LogLevel level, std::string component, std::string message,
                   StringMap fields) {
  LogEvent e;
  e.timestamp = NowUtc();
  e.level = level;
  e.component = std::move(component);
  e.message = std::move(message);
  e.fields = std::move(fields);
  return e;
}

bool MemoryLogSink::Emit(LogEvent event) {
  if (event.level < min_level_) return true;
  EnsureActor(event);
  std::string line = FormatLogLine(event);
  std::lock_guard lock(mu_);
  lines_.push_back(std::move(line));
  events_.push_back(std::move(event));
  return true;
}

std::vector<std::string> MemoryLogSink::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

std::vector<LogEvent> MemoryLogSink::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

FileLogSink::FileLogSink(const std::filesystem::path& path,
                         FileLogSinkOptions options)
    : options_(options) {
  file_ = std::fopen(path.c_str(), "ab");
  if (file_ == nullptr) {
    throw Error(ErrorCode::kStorage, "cannot open log file " + path.string());
  }
  writer_ = std::thread([this] { WriterLoop(); });
}

FileLogSink::~FileLogSink() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  writer_.join();
  std::fclose(file_);
}

bool FileLogSink::Emit(LogEvent event) {
  if (event.level < options_.min_level) return true;
  EnsureActor(event);
  std::string line = FormatLogLine(event);
  line.push_back('\n');
  {
    std::lock_guard lock(mu_);
    if (queue_.size() >= options_.buffer_capacity) {
      dropped_.fetch_add(1);
      return false;
    }
    queue_.push_back(std::move(line));
  }
  cv_.notify_one();
  return true;
}

void FileLogSink::Flush() {
  std::unique_lock lock(mu_);
  drained_.wait(lock, [this] { return queue_.empty() && in_flight_ == 0; });
}

void FileLogSink::WriterLoop() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
    if (queue_.empty() && stop_) break;
    std::deque<std::string> batch;
    batch.swap(queue_);
    in_flight_ = batch.size();
    lock.unlock();
    for (const auto& line : batch) {
      std::fwrite(line.data(), 1, line.size(), file_);
      if (options_.also_stderr) std::fwrite(line.data(), 1, line.size(), stderr);
    }
    std::fflush(file_);
    lock.lock();
    in_flight_ = 0;
    drained_.notify_all();
  }
  drained_.notify_all();
}

bool TeeLogSink::Emit(LogEvent event) {
  bool ok = true;
  for (const auto& sink : sinks_) ok = sink->Emit(event) && ok;
  return ok;
}

void TeeLogSink::Flush() {
  for (const auto& sink : sinks_) sink->Flush();
}

}  // namespace redforge
