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

#ifndef REDFORGE_ERROR_H_
#define REDFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace redforge {

enum class ErrorCode {
  kInvalidArgument,
  kConfiguration,
  kNotFound,
  kInvalidState,
  kCollision,
  kStorage,
  kCorruption,
  kParse,
  kUnboundVariable,
  kTemplateSyntax,
  kUnmappedStem,
  kTargetUnreachable,
  kTargetRejected,
  kJudgeParse,
  kUndefinedMetric,
  kInsufficientTrials,
  kInsufficientLibrary,
  kEmptyLibrary,
  kDuplicate,
  kBatteryConstruction,
  kDegenerateAttacker,
  kEmptyReport,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base exception for every engine failure. `code()` is stable; `what()` is
// meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Target call that exhausted its retries. `status` is the last HTTP status,
// or 0 when the last attempt failed at the transport level.
class TargetUnreachableError : public Error {
 public:
  TargetUnreachableError(int status, int attempts, const std::string& message)
      : Error(ErrorCode::kTargetUnreachable, message),
        status_(status),
        attempts_(attempts) {}

  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  int attempts_;
};

class TargetRejectedError : public Error {
 public:
  TargetRejectedError(int status, const std::string& message)
      : Error(ErrorCode::kTargetRejected, message), status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

class TemplateSyntaxError : public Error {
 public:
  TemplateSyntaxError(size_t offset, const std::string& message)
      : Error(ErrorCode::kTemplateSyntax, message), offset_(offset) {}

  size_t offset() const noexcept { return offset_; }

 private:
  size_t offset_;
};

class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(std::string variable)
      : Error(ErrorCode::kUnboundVariable, "unbound variable: " + variable),
        variable_(std::move(variable)) {}

  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

// Raised by apply_chain; wraps the failing step's error.
class ChainStepError : public Error {
 public:
  ChainStepError(size_t step, ErrorCode inner, const std::string& message)
      : Error(inner, "converter step " + std::to_string(step) + ": " + message),
        step_(step) {}

  size_t step() const noexcept { return step_; }

 private:
  size_t step_;
};

class CorruptionError : public Error {
 public:
  CorruptionError(std::string file, size_t line, const std::string& message)
      : Error(ErrorCode::kCorruption, file + ":" + std::to_string(line) +
                                          ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  size_t line_;
};

}  // namespace redforge

#endif  // REDFORGE_ERROR_H_
