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

#include "redforge/targets.h"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "redforge/error.h"
#include "redforge/rng.h"

namespace redforge {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string PaddedAnswer(const std::string& label, int64_t tokens) {
  std::string out = "Answer: " + label;
  if (tokens > 2) {
    out.push_back('\n');
    for (int64_t i = 2; i < tokens; ++i) {
      if (i > 2) out.push_back(' ');
      out.append("token");
    }
  }
  return out;
}

const std::string& LookupKey(const StringMap& map, const std::string& fingerprint,
                             const char* what) {
  auto it = map.find(fingerprint);
  if (it == map.end()) {
    throw Error(ErrorCode::kUnmappedStem,
                std::string("no ") + what + " for MCQ fingerprint " + fingerprint);
  }
  return it->second;
}

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  size_t scheme_end = url.find("://");
  size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

FinishReason MapFinishReason(const Json& choice) {
  auto it = choice.find("finish_reason");
  if (it == choice.end() || !it->is_string()) return FinishReason::kStop;
  const std::string reason = it->get<std::string>();
  if (reason == "length") return FinishReason::kLength;
  if (reason == "content_filter" || reason == "refusal") return FinishReason::kRefusalFilter;
  return FinishReason::kStop;
}

}  // namespace

int64_t CountTokens(std::string_view text) {
  int64_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::string McqFingerprint(std::string_view content) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(content)));
  return buf;
}

std::optional<McqEnvelope> ParseMcqEnvelope(std::string_view content) {
  auto lines = SplitLines(content);
  size_t marker = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i] == kMcqMarker) {
      marker = i;
      break;
    }
  }
  if (marker == lines.size()) return std::nullopt;
  McqEnvelope env;
  size_t i = marker + 1;
  if (i < lines.size()) env.stem = std::string(lines[i++]);
  for (; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.size() >= 3 && line[0] >= 'A' && line[0] <= 'Z' && line[1] == '.' &&
        line[2] == ' ') {
      env.choices.push_back({std::string(1, line[0]), std::string(line.substr(3))});
    } else if (!env.choices.empty()) {
      break;
    }
  }
  return env;
}

PromptResponse MockRespond(const VulnerabilityProfile& profile,
                           const PromptRequest& request) {
  PromptResponse response;
  response.request_id = request.id;
  response.prompt_tokens = CountTokens(request.content);
  response.finish_reason = FinishReason::kStop;

  const std::string lowered = ToLowerAscii(request.content);
  bool flagged = false;
  for (const auto& keyword : profile.refusal_keywords) {
    if (!keyword.empty() && lowered.find(keyword) != std::string::npos) {
      flagged = true;
      break;
    }
  }
  bool unlocked = false;
  for (const auto& prefix : profile.unlock_prefixes) {
    if (!prefix.empty() && request.content.rfind(prefix, 0) == 0) {
      unlocked = true;
      break;
    }
  }
  if (flagged && !unlocked) {
    response.content = std::string(kMockRefusalText);
    response.completion_tokens = CountTokens(response.content);
    response.finish_reason = FinishReason::kRefusalFilter;
    return response;
  }

  if (auto mcq = ParseMcqEnvelope(request.content); mcq && !mcq->choices.empty()) {
    const std::string fingerprint = McqFingerprint(request.content);
    SplitMix64 rng(DeriveSeed(profile.seed, Fnv1a64(request.content)));
    std::string answer;
    bool correct = false;
    switch (profile.mcq_policy) {
      case McqPolicy::kAlwaysCorrect:
        answer = LookupKey(profile.answer_keys, fingerprint, "answer key");
        correct = true;
        break;
      case McqPolicy::kAlwaysWrong: {
        const std::string& key = LookupKey(profile.answer_keys, fingerprint, "answer key");
        std::vector<std::string> wrong;
        for (const auto& c : mcq->choices) {
          if (c.label != key) wrong.push_back(c.label);
        }
        answer = wrong.empty() ? key : wrong[rng.Below(wrong.size())];
        break;
      }
      case McqPolicy::kUniformRandom:
        answer = mcq->choices[rng.Below(mcq->choices.size())].label;
        break;
      case McqPolicy::kScripted:
        answer = LookupKey(profile.scripted, fingerprint, "scripted answer");
        break;
    }
    if (profile.mcq_policy == McqPolicy::kUniformRandom ||
        profile.mcq_policy == McqPolicy::kScripted) {
      auto it = profile.answer_keys.find(fingerprint);
      correct = it != profile.answer_keys.end() && it->second == answer;
    }
    response.content = PaddedAnswer(
        answer, correct ? profile.verbosity_correct : profile.verbosity_incorrect);
    response.completion_tokens = CountTokens(response.content);
    return response;
  }

  for (const auto& rule : profile.reply_rules) {
    if (rule.contains.empty() || request.content.find(rule.contains) != std::string::npos) {
      response.content = rule.reply;
      response.completion_tokens = CountTokens(response.content);
      return response;
    }
  }

  response.content = "Echo: " + CollapseWhitespace(request.content);
  response.completion_tokens = CountTokens(response.content);
  return response;
}

PromptResponse MockTarget::Send(const Conversation&, const PromptRequest& request) {
  return MockRespond(spec_.profile, request);
}

HttpChatTarget::HttpChatTarget(TargetSpec spec, HttpChatHooks hooks)
    : spec_(std::move(spec)), hooks_(std::move(hooks)) {
  if (!hooks_.getenv) {
    hooks_.getenv = [](const std::string& name) -> std::optional<std::string> {
      const char* v = std::getenv(name.c_str());
      if (v == nullptr) return std::nullopt;
      return std::string(v);
    };
  }
  if (!hooks_.sleep) {
    hooks_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

Json BuildChatRequestBody(const TargetSpec& spec, const Conversation& conversation,
                          const PromptRequest& request) {
  Json messages = Json::array();
  for (const auto& turn : conversation.turns) {
    messages.push_back({{"role", ToString(turn.request.role)},
                        {"content", turn.request.content}});
    if (turn.response && turn.response->finish_reason != FinishReason::kError) {
      messages.push_back({{"role", "assistant"}, {"content", turn.response->content}});
    }
  }
  messages.push_back({{"role", ToString(request.role)}, {"content", request.content}});
  return Json{{"model", spec.model_name},
              {"messages", messages},
              {"temperature", spec.temperature},
              {"max_tokens", spec.max_tokens}};
}

PromptResponse HttpChatTarget::Send(const Conversation& conversation,
                                    const PromptRequest& request) {
  std::optional<std::string> secret;
  if (!spec_.credential_ref.empty()) {
    secret = hooks_.getenv(spec_.credential_ref);
    if (!secret) {
      throw Error(ErrorCode::kConfiguration,
                  "credential variable " + spec_.credential_ref + " is not set");
    }
  }

  const ParsedUrl url = SplitUrl(spec_.endpoint_url);
  const std::string body = BuildChatRequestBody(spec_, conversation, request).dump();
  httplib::Headers headers;
  if (secret) headers.emplace("Authorization", "Bearer " + *secret);

  const auto timeout = std::chrono::milliseconds(spec_.timeout_ms);
  int last_status = 0;
  std::string last_error;
  const int max_attempts = std::max(1, spec_.retry.max_attempts);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    last_attempts_ = attempt;
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(url.path, headers, body, "application/json");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    bool transient = false;
    if (!result) {
      transient = true;
      last_status = 0;
      last_error = httplib::to_string(result.error());
    } else if (result->status == 200) {
      Json reply = Json::parse(result->body, nullptr, false);
      if (reply.is_discarded() || !reply.contains("choices") ||
          !reply["choices"].is_array() || reply["choices"].empty()) {
        throw TargetRejectedError(200, "malformed chat reply from " + spec_.id);
      }
      const Json& choice = reply["choices"][0];
      PromptResponse response;
      response.request_id = request.id;
      if (choice.contains("message") && choice["message"].contains("content") &&
          choice["message"]["content"].is_string()) {
        response.content = choice["message"]["content"].get<std::string>();
      }
      response.finish_reason = MapFinishReason(choice);
      response.latency_ms = latency.count();
      auto usage = reply.find("usage");
      if (usage != reply.end() && usage->is_object() &&
          usage->contains("completion_tokens")) {
        response.prompt_tokens = usage->value("prompt_tokens", int64_t{0});
        response.completion_tokens = usage->value("completion_tokens", int64_t{0});
      } else {
        response.prompt_tokens = CountTokens(request.content);
        response.completion_tokens = CountTokens(response.content);
      }
      return response;
    } else if (result->status == 429 || result->status >= 500) {
      transient = true;
      last_status = result->status;
      last_error = "HTTP " + std::to_string(result->status);
    } else {
      throw TargetRejectedError(result->status, "target " + spec_.id + " rejected request: HTTP " +
                                                    std::to_string(result->status));
    }

    if (transient && attempt < max_attempts) {
      hooks_.sleep(std::chrono::milliseconds(
          static_cast<int64_t>(spec_.retry.base_backoff_ms) << (attempt - 1)));
    }
  }
  throw TargetUnreachableError(last_status, max_attempts,
                               "target " + spec_.id + " unreachable after " +
                                   std::to_string(max_attempts) + " attempts (" +
                                   last_error + ")");
}

std::unique_ptr<Target> MakeTarget(const TargetSpec& spec) {
  if (spec.kind == TargetKind::kMock) return std::make_unique<MockTarget>(spec);
  return std::make_unique<HttpChatTarget>(spec);
}

PromptResponse SendPrompt(const TargetSpec& spec, const Conversation& conversation,
                          const PromptRequest& request) {
  return MakeTarget(spec)->Send(conversation, request);
}

}  // namespace redforge
