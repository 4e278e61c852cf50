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


#include "redforge/gateway.h"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "redforge/error.h"
#include "redforge/ids.h"
#include "redforge/report.h"
#include "redforge/validate.h"

namespace redforge {
namespace {

constexpr std::string_view kApiVersion = "1.0.0";

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

// Fills `params` with the brace segments on a match.
bool MatchPattern(std::string_view pattern, const std::vector<std::string>& segments,
                  std::vector<std::string>& params) {
  const auto parts = SplitPath(pattern);
  if (parts.size() != segments.size()) return false;
  std::vector<std::string> captured;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].front() == '{') {
      captured.push_back(segments[i]);
    } else if (parts[i] != segments[i]) {
      return false;
    }
  }
  params = std::move(captured);
  return true;
}

ApiResponse JsonResponse(int status, const Json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

ApiResponse ErrorResponse(int status, std::string_view code, const std::string& message) {
  return JsonResponse(status, Json{{"error", {{"code", code}, {"message", message}}}});
}

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kConfiguration:
      return 400;
    case ErrorCode::kInvalidState:
    case ErrorCode::kCollision:
    case ErrorCode::kEmptyReport:
      return 409;
    default:
      return 500;
  }
}

Json ParseBody(const ApiRequest& request) {
  if (request.body.empty()) return Json::object();
  try {
    return Json::parse(request.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("request body: ") + e.what());
  }
}

int RoleRank(Role r) {
  switch (r) {
    case Role::kViewer:
      return 0;
    case Role::kOperator:
      return 1;
    case Role::kAdmin:
      return 2;
  }
  return 0;
}

std::optional<std::string> BearerCredential(const ApiRequest& request) {
  auto it = request.headers.find("authorization");
  if (it == request.headers.end()) return std::nullopt;
  std::string_view v = it->second;
  if (v.size() < 7) return std::string();
  std::string scheme(v.substr(0, 7));
  for (char& c : scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (scheme != "bearer ") return std::string();
  v.remove_prefix(7);
  while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
  while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
  return std::string(v);
}

}  // namespace

const std::vector<EndpointInfo>& Endpoints() {
  static const std::vector<EndpointInfo> kEndpoints = {
      {"GET", "/v1/health", "Liveness probe", std::nullopt},
      {"GET", "/v1/spec", "This API description", Role::kViewer},
      {"POST", "/v1/campaigns", "Validate and store a campaign", Role::kOperator},
      {"POST", "/v1/campaigns/{id}/runs", "Start a run of a stored campaign", Role::kOperator},
      {"GET", "/v1/runs", "List runs", Role::kViewer},
      {"GET", "/v1/runs/{id}", "Run status and counters", Role::kViewer},
      {"GET", "/v1/runs/{id}/results", "Score records, filterable", Role::kViewer},
      {"GET", "/v1/runs/{id}/report", "Leaderboard or run summary", Role::kViewer},
      {"POST", "/v1/runs/{id}/cancel", "Cancel an active run", Role::kOperator},
      {"POST", "/v1/tokens", "Issue an API token", Role::kAdmin},
      {"GET", "/v1/targets", "List registered targets", Role::kViewer},
      {"POST", "/v1/targets", "Register a target", Role::kAdmin},
  };
  return kEndpoints;
}

RoleMatrix RoleMatrix::Default() {
  RoleMatrix m;
  for (const auto& e : Endpoints()) {
    if (!e.min_role) continue;
    for (Role r : {Role::kViewer, Role::kOperator, Role::kAdmin}) {
      m.Set(r, e.method, e.pattern, RoleRank(r) >= RoleRank(*e.min_role));
    }
  }
  return m;
}

bool RoleMatrix::Allows(Role role, std::string_view method, std::string_view pattern) const {
  auto it = cells_.find(std::make_tuple(role, std::string(method), std::string(pattern)));
  return it != cells_.end() && it->second;
}

void RoleMatrix::Set(Role role, std::string method, std::string pattern, bool allow) {
  cells_[std::make_tuple(role, std::move(method), std::move(pattern))] = allow;
}

bool RoleMatrix::IsTotal() const {
  for (const auto& e : Endpoints()) {
    if (!e.min_role) continue;
    for (Role r : {Role::kViewer, Role::kOperator, Role::kAdmin}) {
      if (!cells_.count(std::make_tuple(r, e.method, e.pattern))) return false;
    }
  }
  return true;
}

Clock SteadyClock() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
}

TokenBucketLimiter::TokenBucketLimiter(Clock clock) : clock_(std::move(clock)) {}

TokenBucketLimiter::Decision TokenBucketLimiter::Admit(const std::string& token_id,
                                                       const RateLimit& limit) {
  const double now = clock_();
  const double capacity = limit.capacity;
  const double per_second = limit.refill_per_minute / 60.0;
  std::lock_guard lock(mu_);
  auto [it, inserted] = buckets_.try_emplace(token_id, Bucket{capacity, now});
  Bucket& b = it->second;
  if (!inserted) {
    b.tokens = std::min(capacity, b.tokens + std::max(0.0, now - b.updated) * per_second);
    b.updated = now;
  }
  if (b.tokens >= 1.0) {
    b.tokens -= 1.0;
    return {true, 0};
  }
  const int wait = static_cast<int>(std::ceil((1.0 - b.tokens) / per_second));
  return {false, std::max(1, wait)};
}

Gateway::Gateway(Engine& engine, TokenStore& tokens, LogSink& log, GatewayOptions options)
    : engine_(engine),
      tokens_(tokens),
      log_(log),
      options_(std::move(options)),
      limiter_(options_.clock ? options_.clock : SteadyClock()) {}

void Gateway::Audit(std::string actor, std::string message, StringMap fields) {
  fields["actor"] = std::move(actor);
  log_.Emit(MakeEvent(LogLevel::kAudit, "gateway", std::move(message), std::move(fields)));
}

ApiResponse Gateway::Handle(const ApiRequest& request) {
  const auto segments = SplitPath(request.path);
  const EndpointInfo* endpoint = nullptr;
  std::vector<std::string> params;
  bool path_known = false;
  for (const auto& e : Endpoints()) {
    std::vector<std::string> p;
    if (!MatchPattern(e.pattern, segments, p)) continue;
    path_known = true;
    if (e.method == request.method) {
      endpoint = &e;
      params = std::move(p);
      break;
    }
  }
  if (endpoint == nullptr) {
    return path_known ? ErrorResponse(405, "method_not_allowed", "method not allowed")
                      : ErrorResponse(404, "not_found", "no such endpoint");
  }

  const StringMap where = {{"endpoint", endpoint->method + " " + endpoint->pattern},
                           {"source", request.remote_addr}};
  if (!endpoint->min_role) return Dispatch(*endpoint, params, request, nullptr);

  const auto credential = BearerCredential(request);
  std::optional<ApiToken> token;
  if (credential && !credential->empty()) token = tokens_.Verify(*credential);
  if (!token) {
    StringMap fields = where;
    fields["reason"] = !credential ? "missing credential"
                                   : credential->empty() ? "malformed credential"
                                                         : "invalid credential";
    if (credential && !credential->empty()) fields["token_prefix"] = BearerPrefix(*credential);
    Audit("anonymous", "authentication failed", fields);
    ApiResponse r = ErrorResponse(401, "unauthenticated", "a valid bearer token is required");
    r.headers["WWW-Authenticate"] = "Bearer";
    return r;
  }

  if (!options_.matrix.Allows(token->role, endpoint->method, endpoint->pattern)) {
    StringMap fields = where;
    fields["token_id"] = token->token_id;
    fields["role"] = std::string(ToString(token->role));
    Audit(token->token_id, "authorization denied", fields);
    return ErrorResponse(403, "forbidden", "role " + std::string(ToString(token->role)) +
                                               " may not call " + endpoint->method + " " +
                                               endpoint->pattern);
  }

  const auto decision = limiter_.Admit(token->token_id, token->rate_limit);
  if (!decision.allowed) {
    StringMap fields = where;
    fields["token_id"] = token->token_id;
    fields["retry_after"] = std::to_string(decision.retry_after);
    log_.Emit(MakeEvent(LogLevel::kWarn, "gateway", "rate limited", fields));
    ApiResponse r = ErrorResponse(429, "rate_limited", "rate limit exceeded");
    r.headers["Retry-After"] = std::to_string(decision.retry_after);
    return r;
  }

  Identity who{*token};
  return Dispatch(*endpoint, params, request, &who);
}

ApiResponse Gateway::Dispatch(const EndpointInfo& endpoint, const std::vector<std::string>& params,
                              const ApiRequest& request, const Identity* who) {
  const std::string& key = endpoint.pattern;
  const bool post = endpoint.method == "POST";
  try {
    if (key == "/v1/health") return JsonResponse(200, Json{{"status", "ok"}});
    if (key == "/v1/spec") return JsonResponse(200, ApiDescription());
    if (key == "/v1/campaigns") return PostCampaign(request, *who);
    if (key == "/v1/campaigns/{id}/runs") return PostRun(params[0], *who);
    if (key == "/v1/runs") return ListRuns();
    if (key == "/v1/runs/{id}") return GetRun(params[0]);
    if (key == "/v1/runs/{id}/results") return GetResults(params[0], request);
    if (key == "/v1/runs/{id}/report") return GetReport(params[0], request);
    if (key == "/v1/runs/{id}/cancel") return CancelRun(params[0], *who);
    if (key == "/v1/tokens") return PostToken(request, *who);
    if (key == "/v1/targets") return post ? PostTarget(request, *who) : ListTargets();
    return ErrorResponse(404, "not_found", "no such endpoint");
  } catch (const Error& e) {
    const int status = HttpStatusFor(e.code());
    if (status >= 500) {
      log_.Emit(MakeEvent(LogLevel::kError, "gateway", "request failed",
                          {{"endpoint", endpoint.method + " " + endpoint.pattern},
                           {"error", e.what()}}));
    }
    return ErrorResponse(status, ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    log_.Emit(MakeEvent(LogLevel::kError, "gateway", "request failed",
                        {{"endpoint", endpoint.method + " " + endpoint.pattern},
                         {"error", e.what()}}));
    return ErrorResponse(500, "internal", "internal error");
  }
}

ApiResponse Gateway::PostCampaign(const ApiRequest& request, const Identity& who) {
  CampaignConfig config;
  try {
    config = ParseBody(request).get<CampaignConfig>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kParse, std::string("campaign: ") + e.what());
  }
  if (config.id.empty()) config.id = NewId();
  ValidationResult v = engine_.Validate(config);
  if (!v.ok()) {
    return JsonResponse(400, Json{{"error",
                                   {{"code", "invalid_argument"},
                                    {"message", "campaign failed validation"},
                                    {"details", v.errors}}}});
  }
  {
    std::lock_guard lock(mu_);
    campaigns_[config.id] = config;
  }
  Audit(who.token.token_id, "campaign stored", {{"campaign_id", config.id}});
  return JsonResponse(201, Json{{"campaign_id", config.id},
                                {"orchestrator", OrchestratorKindName(config.orchestrator)}});
}

ApiResponse Gateway::PostRun(const std::string& campaign_id, const Identity& who) {
  CampaignConfig config;
  {
    std::lock_guard lock(mu_);
    auto it = campaigns_.find(campaign_id);
    if (it == campaigns_.end()) {
      return ErrorResponse(404, "not_found", "campaign " + campaign_id + " not found");
    }
    config = it->second;
  }
  const std::string run_id = engine_.Start(config);
  Audit(who.token.token_id, "run started", {{"campaign_id", campaign_id}, {"run_id", run_id}});
  return JsonResponse(202, Json{{"run_id", run_id}, {"campaign_id", campaign_id}});
}

ApiResponse Gateway::ListRuns() {
  Json runs = Json::array();
  for (const auto& r : engine_.store().ListRuns()) {
    try {
      runs.push_back(engine_.Status(r.run_id));
    } catch (const Error&) {
      runs.push_back(r);
    }
  }
  return JsonResponse(200, Json{{"runs", runs}});
}

ApiResponse Gateway::GetRun(const std::string& run_id) {
  if (!engine_.store().Exists(run_id)) {
    return ErrorResponse(404, "not_found", "run " + run_id + " not found");
  }
  return JsonResponse(200, Json(engine_.Status(run_id)));
}

ApiResponse Gateway::GetResults(const std::string& run_id, const ApiRequest& request) {
  ScoreFilter filter;
  auto q = [&](const char* name) -> std::optional<std::string> {
    auto it = request.query.find(name);
    if (it == request.query.end()) return std::nullopt;
    return it->second;
  };
  filter.target_id = q("target_id");
  filter.scorer_id = q("scorer_id");
  if (auto c = q("category")) filter.category = ParseMcqCategory(*c);
  if (auto c = q("correct")) {
    if (*c != "true" && *c != "false") {
      throw Error(ErrorCode::kInvalidArgument, "correct must be true or false");
    }
    filter.correct = *c == "true";
  }
  const LoadedRun run = engine_.store().LoadRun(run_id);
  const auto records = run.Query(filter);
  return JsonResponse(200, Json{{"run_id", run_id}, {"count", records.size()}, {"results", records}});
}

ApiResponse Gateway::GetReport(const std::string& run_id, const ApiRequest& request) {
  ReportFormat format = ReportFormat::kStructured;
  if (auto it = request.query.find("format"); it != request.query.end()) {
    format = ParseReportFormat(it->second);
  }
  const RunReport report = BuildRunReport(engine_.store().LoadRun(run_id));
  ApiResponse r;
  r.body = RenderRunReport(report, format);
  if (format == ReportFormat::kTable) r.content_type = "text/plain; charset=utf-8";
  return r;
}

ApiResponse Gateway::CancelRun(const std::string& run_id, const Identity& who) {
  const RunRecord record = engine_.Cancel(run_id);
  Audit(who.token.token_id, "run cancelled", {{"run_id", run_id}});
  return JsonResponse(200, Json(record));
}

ApiResponse Gateway::PostToken(const ApiRequest& request, const Identity& who) {
  const Json body = ParseBody(request);
  Role role = Role::kViewer;
  RateLimit limit;
  std::string label;
  try {
    role = ParseRole(body.value("role", std::string("viewer")));
    if (body.contains("rate_limit")) limit = body.at("rate_limit").get<RateLimit>();
    label = body.value("label", std::string());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kParse, std::string("token request: ") + e.what());
  }
  IssuedToken issued = tokens_.Create(role, limit, label);
  Audit(who.token.token_id, "token issued",
        {{"token_id", issued.token.token_id}, {"role", std::string(ToString(role))}});
  return JsonResponse(201, Json{{"token_id", issued.token.token_id},
                                {"role", ToString(role)},
                                {"rate_limit", issued.token.rate_limit},
                                {"token", issued.bearer}});
}

ApiResponse Gateway::ListTargets() {
  return JsonResponse(200, Json{{"targets", engine_.Targets()}});
}

ApiResponse Gateway::PostTarget(const ApiRequest& request, const Identity& who) {
  TargetSpec spec;
  try {
    spec = ParseBody(request).get<TargetSpec>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kParse, std::string("target: ") + e.what());
  }
  const auto violations = TargetSpecViolations(spec);
  if (!violations.empty()) {
    return JsonResponse(400, Json{{"error",
                                   {{"code", "invalid_argument"},
                                    {"message", "target failed validation"},
                                    {"details", violations}}}});
  }
  engine_.RegisterTarget(spec);
  Audit(who.token.token_id, "target registered", {{"target_id", spec.id}});
  return JsonResponse(201, Json{{"target_id", spec.id}});
}

Json Gateway::ApiDescription() const {
  Json paths = Json::object();
  for (const auto& e : Endpoints()) {
    std::string method = e.method;
    for (char& c : method) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    Json op{{"summary", e.summary}, {"responses", Json::object()}};
    Json& responses = op["responses"];
    responses[e.method == "POST" && e.pattern != "/v1/runs/{id}/cancel"
                  ? (e.pattern == "/v1/campaigns/{id}/runs" ? "202" : "201")
                  : "200"] = {{"description", "success"}};
    if (e.min_role) {
      op["security"] = Json::array({{{"bearer", Json::array()}}});
      op["x-min-role"] = ToString(*e.min_role);
      responses["401"] = {{"description", "missing or invalid token"}};
      responses["403"] = {{"description", "role not permitted"}};
      responses["429"] = {{"description", "rate limited; see Retry-After"}};
    } else {
      op["security"] = Json::array();
    }
    Json parameters = Json::array();
    if (e.pattern.find("{id}") != std::string::npos) {
      parameters.push_back(
          {{"name", "id"}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}});
      responses["404"] = {{"description", "not found"}};
    }
    if (e.pattern == "/v1/runs/{id}/results") {
      for (const char* name : {"target_id", "category", "correct", "scorer_id"}) {
        parameters.push_back({{"name", name}, {"in", "query"}, {"schema", {{"type", "string"}}}});
      }
    }
    if (e.pattern == "/v1/runs/{id}/report") {
      parameters.push_back({{"name", "format"},
                            {"in", "query"},
                            {"schema", {{"type", "string"}, {"enum", {"structured", "table"}}}}});
    }
    if (e.pattern == "/v1/runs/{id}/cancel") responses["409"] = {{"description", "run not active"}};
    if (!parameters.empty()) op["parameters"] = parameters;
    paths[e.pattern][method] = op;
  }
  return Json{{"openapi", "3.0.3"},
              {"info", {{"title", "RedForge API"}, {"version", kApiVersion}}},
              {"paths", paths},
              {"components",
               {{"securitySchemes", {{"bearer", {{"type", "http"}, {"scheme", "bearer"}}}}}}}};
}

BindAddress ParseBindAddress(std::string_view text) {
  BindAddress out;
  const size_t colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kConfiguration, "bind address must be host:port");
  }
  out.host = std::string(text.substr(0, colon));
  const std::string port(text.substr(colon + 1));
  try {
    size_t used = 0;
    out.port = std::stoi(port, &used);
    if (used != port.size() || out.port < 0 || out.port > 65535) throw std::out_of_range(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfiguration, "invalid port in bind address: " + port);
  }
  if (out.host.empty()) throw Error(ErrorCode::kConfiguration, "bind address needs a host");
  return out;
}

struct GatewayServer::Impl {
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
};

GatewayServer::GatewayServer(Gateway& gateway, const BindAddress& bind)
    : impl_(std::make_unique<Impl>()) {
  auto handler = [&gateway](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api;
    api.method = req.method;
    api.path = req.path;
    for (const auto& [k, v] : req.params) api.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      api.headers.emplace(std::move(key), v);
    }
    api.body = req.body;
    api.remote_addr = req.remote_addr + ":" + std::to_string(req.remote_port);
    ApiResponse out = gateway.Handle(api);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    res.set_content(out.body, out.content_type);
  };
  auto& s = impl_->server;
  s.Get(".*", handler);
  s.Post(".*", handler);
  s.Put(".*", handler);
  s.Delete(".*", handler);
  s.Patch(".*", handler);

  // httplib's default also sets SO_REUSEPORT, which lets a second listener
  // share a port that is already taken.
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });

  impl_->host = bind.host;
  if (bind.port == 0) {
    impl_->port = s.bind_to_any_port(bind.host);
  } else {
    impl_->port = s.bind_to_port(bind.host, bind.port) ? bind.port : -1;
  }
  if (impl_->port <= 0) {
    throw Error(ErrorCode::kConfiguration,
                "cannot bind " + bind.host + ":" + std::to_string(bind.port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

GatewayServer::~GatewayServer() { Stop(); }

int GatewayServer::port() const { return impl_->port; }

std::string GatewayServer::base_url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

bool GatewayServer::running() const { return impl_->server.is_running(); }

void GatewayServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace redforge
