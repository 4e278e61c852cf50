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


// HTTP API over the engine: bearer-token authentication, role-based
// authorization, per-token rate limiting and audit events. Request handling
// is transport independent; GatewayServer binds it to an HTTP listener.

#ifndef REDFORGE_GATEWAY_H_
#define REDFORGE_GATEWAY_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "redforge/log.h"
#include "redforge/model.h"
#include "redforge/orchestration.h"
#include "redforge/token_store.h"

namespace redforge {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  // Keys lowercased.
  std::map<std::string, std::string> headers;
  std::string body;
  std::string remote_addr;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;

  Json JsonBody() const { return Json::parse(body); }
};

struct EndpointInfo {
  std::string method;
  // Segments in braces match any single path segment.
  std::string pattern;
  std::string summary;
  // Unset for endpoints that need no token.
  std::optional<Role> min_role;
};

// Every exposed endpoint.
const std::vector<EndpointInfo>& Endpoints();

// Allow/deny for every (role, method, pattern) cell.
class RoleMatrix {
 public:
  static RoleMatrix Default();

  bool Allows(Role role, std::string_view method, std::string_view pattern) const;
  void Set(Role role, std::string method, std::string pattern, bool allow);
  // True when every authenticated endpoint has a cell for every role.
  bool IsTotal() const;

 private:
  std::map<std::tuple<Role, std::string, std::string>, bool, std::less<>> cells_;
};

// Seconds on a monotonic clock.
using Clock = std::function<double()>;
Clock SteadyClock();

class TokenBucketLimiter {
 public:
  struct Decision {
    bool allowed = true;
    // Whole seconds until one token accrues; 0 when allowed.
    int retry_after = 0;
  };

  explicit TokenBucketLimiter(Clock clock);

  Decision Admit(const std::string& token_id, const RateLimit& limit);

 private:
  struct Bucket {
    double tokens = 0;
    double updated = 0;
  };

  Clock clock_;
  std::mutex mu_;
  std::map<std::string, Bucket> buckets_;
};

struct GatewayOptions {
  Clock clock;
  RoleMatrix matrix = RoleMatrix::Default();
};

class Gateway {
 public:
  // `log` receives AUDIT and request events; it must outlive the gateway.
  Gateway(Engine& engine, TokenStore& tokens, LogSink& log, GatewayOptions options = {});

  ApiResponse Handle(const ApiRequest& request);

  // OpenAPI 3 description of Endpoints().
  Json ApiDescription() const;

 private:
  struct Identity {
    ApiToken token;
  };

  ApiResponse Dispatch(const EndpointInfo& endpoint, const std::vector<std::string>& params,
                       const ApiRequest& request, const Identity* identity);
  void Audit(std::string actor, std::string message, StringMap fields);

  ApiResponse PostCampaign(const ApiRequest& request, const Identity& who);
  ApiResponse PostRun(const std::string& campaign_id, const Identity& who);
  ApiResponse ListRuns();
  ApiResponse GetRun(const std::string& run_id);
  ApiResponse GetResults(const std::string& run_id, const ApiRequest& request);
  ApiResponse GetReport(const std::string& run_id, const ApiRequest& request);
  ApiResponse CancelRun(const std::string& run_id, const Identity& who);
  ApiResponse PostToken(const ApiRequest& request, const Identity& who);
  ApiResponse ListTargets();
  ApiResponse PostTarget(const ApiRequest& request, const Identity& who);

  Engine& engine_;
  TokenStore& tokens_;
  LogSink& log_;
  GatewayOptions options_;
  TokenBucketLimiter limiter_;
  std::mutex mu_;
  std::map<std::string, CampaignConfig> campaigns_;
};

// "host:port"; port 0 picks an ephemeral port.
struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};
BindAddress ParseBindAddress(std::string_view text);

// Serves a Gateway over HTTP on a background thread.
class GatewayServer {
 public:
  // Throws Error(kConfiguration) when the address cannot be bound.
  GatewayServer(Gateway& gateway, const BindAddress& bind);
  ~GatewayServer();

  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  int port() const;
  std::string base_url() const;
  bool running() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace redforge

#endif  // REDFORGE_GATEWAY_H_
