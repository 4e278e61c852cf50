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

#ifndef REDFORGE_MOCK_SERVER_H_
#define REDFORGE_MOCK_SERVER_H_

#include <memory>
#include <string>
#include <vector>

#include "redforge/model.h"

namespace redforge {

// The mock target mounted behind a real HTTP listener speaking the
// chat-completion wire format. Binds 127.0.0.1 on an ephemeral port.
class MockChatServer {
 public:
  explicit MockChatServer(VulnerabilityProfile profile, bool include_usage = true);
  ~MockChatServer();

  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  // The next requests get these statuses (in order) before normal service.
  void ScriptFailures(std::vector<int> statuses);

  int port() const;
  // Full endpoint URL, e.g. http://127.0.0.1:40123/v1/chat/completions
  std::string url() const;
  int requests_received() const;
  std::vector<std::string> authorization_headers() const;

  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace redforge

#endif  // REDFORGE_MOCK_SERVER_H_
