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

#include "redforge/mock_server.h"

#include <deque>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "redforge/error.h"
#include "redforge/targets.h"

namespace redforge {

struct MockChatServer::Impl {
  VulnerabilityProfile profile;
  bool include_usage = true;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mu;
  std::deque<int> failures;
  int received = 0;
  std::vector<std::string> auth_headers;
};

MockChatServer::MockChatServer(VulnerabilityProfile profile, bool include_usage)
    : impl_(std::make_unique<Impl>()) {
  impl_->profile = std::move(profile);
  impl_->include_usage = include_usage;
  Impl* impl = impl_.get();
  impl->server.Post("/v1/chat/completions", [impl](const httplib::Request& req,
                                                   httplib::Response& res) {
    int scripted_status = 0;
    {
      std::lock_guard lock(impl->mu);
      ++impl->received;
      impl->auth_headers.push_back(req.get_header_value("Authorization"));
      if (!impl->failures.empty()) {
        scripted_status = impl->failures.front();
        impl->failures.pop_front();
      }
    }
    if (scripted_status != 0) {
      res.status = scripted_status;
      res.set_content(R"({"error":{"message":"scripted failure"}})", "application/json");
      return;
    }
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("messages") || !body["messages"].is_array() ||
        body["messages"].empty()) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"messages required"}})", "application/json");
      return;
    }
    PromptRequest request;
    request.content = body["messages"].back().value("content", "");
    PromptResponse response;
    try {
      response = MockRespond(impl->profile, request);
    } catch (const Error& e) {
      res.status = 422;
      res.set_content(Json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
      return;
    }
    Json reply = {
        {"id", "mock"},
        {"object", "chat.completion"},
        {"model", body.value("model", "mock")},
        {"choices",
         Json::array({{{"index", 0},
                       {"message", {{"role", "assistant"}, {"content", response.content}}},
                       {"finish_reason", response.finish_reason == FinishReason::kRefusalFilter
                                             ? "content_filter"
                                             : "stop"}}})}};
    if (impl->include_usage) {
      reply["usage"] = {{"prompt_tokens", response.prompt_tokens},
                        {"completion_tokens", response.completion_tokens},
                        {"total_tokens", response.prompt_tokens + response.completion_tokens}};
    }
    res.set_content(reply.dump(), "application/json");
  });
  impl->port = impl->server.bind_to_any_port("127.0.0.1");
  if (impl->port < 0) throw Error(ErrorCode::kConfiguration, "mock server bind failed");
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
}

MockChatServer::~MockChatServer() { Stop(); }

void MockChatServer::Stop() {
  if (impl_ && impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

void MockChatServer::ScriptFailures(std::vector<int> statuses) {
  std::lock_guard lock(impl_->mu);
  impl_->failures.assign(statuses.begin(), statuses.end());
}

int MockChatServer::port() const { return impl_->port; }

std::string MockChatServer::url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1/chat/completions";
}

int MockChatServer::requests_received() const {
  std::lock_guard lock(impl_->mu);
  return impl_->received;
}

std::vector<std::string> MockChatServer::authorization_headers() const {
  std::lock_guard lock(impl_->mu);
  return impl_->auth_headers;
}

}  // namespace redforge
