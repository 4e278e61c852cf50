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

#ifndef REDFORGE_LOG_H_
#define REDFORGE_LOG_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "redforge/model.h"

namespace redforge {

// Renders one event as a single-line JSON record: ts, level, component, msg
// and the custom fields flattened alongside them.
std::string FormatLogLine(const LogEvent& event);

// Shorthand for building events with the current time.
LogEvent MakeEvent(LogLevel level, std::string component, std::string message,
                   StringMap fields = {});

class LogSink {
 public:
  virtual ~LogSink() = default;

  // Returns true when the event was accepted (or filtered by level). A full
  // buffer drops the event, bumps dropped(), and returns false.
  virtual bool Emit(LogEvent event) = 0;
  virtual void Flush() {}
  virtual uint64_t dropped() const { return 0; }
};

// Discards everything.
class NullLogSink : public LogSink {
 public:
  bool Emit(LogEvent) override { return true; }
};

// Keeps formatted lines in memory; handy for tests and audits.
class MemoryLogSink : public LogSink {
 public:
  explicit MemoryLogSink(LogLevel min_level = LogLevel::kDebug)
      : min_level_(min_level) {}

  bool Emit(LogEvent event) override;
  std::vector<std::string> lines() const;
  std::vector<LogEvent> events() const;

 private:
  LogLevel min_level_;
  mutable std::mutex mu_;
  std::vector<LogEvent> events_;
  std::vector<std::string> lines_;
};

struct FileLogSinkOptions {
  LogLevel min_level = LogLevel::kInfo;
  bool also_stderr = false;
  size_t buffer_capacity = 4096;
};

// Appends to a file from a background writer so Emit never waits on disk.
class FileLogSink : public LogSink {
 public:
  FileLogSink(const std::filesystem::path& path, FileLogSinkOptions options = {});
  ~FileLogSink() override;

  FileLogSink(const FileLogSink&) = delete;
  FileLogSink& operator=(const FileLogSink&) = delete;

  bool Emit(LogEvent event) override;
  // Blocks until every accepted event reached the file.
  void Flush() override;
  uint64_t dropped() const override { return dropped_.load(); }

 private:
  void WriterLoop();

  FileLogSinkOptions options_;
  std::FILE* file_ = nullptr;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable drained_;
  std::deque<std::string> queue_;
  size_t in_flight_ = 0;
  bool stop_ = false;
  std::atomic<uint64_t> dropped_{0};
  std::thread writer_;
};

// Forwards to several sinks.
class TeeLogSink : public LogSink {
 public:
  explicit TeeLogSink(std::vector<std::shared_ptr<LogSink>> sinks)
      : sinks_(std::move(sinks)) {}

  bool Emit(LogEvent event) override;
  void Flush() override;

 private:
  std::vector<std::shared_ptr<LogSink>> sinks_;
};

}  // namespace redforge

#endif  // REDFORGE_LOG_H_
