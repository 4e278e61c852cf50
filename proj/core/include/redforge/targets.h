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

// Target adapters: the chat-completion wire client and the deterministic
// mock used as a test oracle.

#ifndef REDFORGE_TARGETS_H_
#define REDFORGE_TARGETS_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redforge/model.h"

namespace redforge {

// Line that marks a prompt as a multiple-choice question.
inline constexpr std::string_view kMcqMarker = "[[MCQ]]";

inline constexpr std::string_view kMockRefusalText =
    "I'm sorry, but I can't help with that request.";

// Number of maximal non-whitespace runs.
int64_t CountTokens(std::string_view text);

// Stable key for an MCQ prompt (FNV-1a of the whole content, 16 hex chars).
std::string McqFingerprint(std::string_view content);

struct McqEnvelope {
  std::string stem;
  std::vector<McqChoice> choices;
};

// Parses the block after the `[[MCQ]]` line; nullopt when absent.
std::optional<McqEnvelope> ParseMcqEnvelope(std::string_view content);

// Pure function of (profile, request.content). Throws Error(kUnmappedStem)
// when an MCQ policy needs a key the profile does not have.
PromptResponse MockRespond(const VulnerabilityProfile& profile,
                           const PromptRequest& request);

class Target {
 public:
  virtual ~Target() = default;

  virtual const TargetSpec& spec() const = 0;

  // Does not modify `conversation`; the caller appends the turn.
  virtual PromptResponse Send(const Conversation& conversation,
                              const PromptRequest& request) = 0;
};

class MockTarget : public Target {
 public:
  explicit MockTarget(TargetSpec spec) : spec_(std::move(spec)) {}

  const TargetSpec& spec() const override { return spec_; }
  PromptResponse Send(const Conversation& conversation,
                      const PromptRequest& request) override;

 private:
  TargetSpec spec_;
};

struct HttpChatHooks {
  // Environment lookup; defaults to std::getenv.
  std::function<std::optional<std::string>(const std::string&)> getenv;
  // Backoff sleep; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class HttpChatTarget : public Target {
 public:
  explicit HttpChatTarget(TargetSpec spec, HttpChatHooks hooks = {});

  const TargetSpec& spec() const override { return spec_; }

  // Retries timeouts, 5xx and 429 with backoff base * 2^(attempt-1).
  // Throws TargetUnreachableError, TargetRejectedError, or Error(kConfiguration)
  // when the credential variable is unset.
  PromptResponse Send(const Conversation& conversation,
                      const PromptRequest& request) override;

  int last_attempts() const { return last_attempts_; }

 private:
  TargetSpec spec_;
  HttpChatHooks hooks_;
  int last_attempts_ = 0;
};

// Wire request body for the chat-completion protocol.
Json BuildChatRequestBody(const TargetSpec& spec, const Conversation& conversation,
                          const PromptRequest& request);

std::unique_ptr<Target> MakeTarget(const TargetSpec& spec);

PromptResponse SendPrompt(const TargetSpec& spec, const Conversation& conversation,
                          const PromptRequest& request);

}  // namespace redforge

#endif  // REDFORGE_TARGETS_H_
