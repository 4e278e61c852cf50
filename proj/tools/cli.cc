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


#include "cli.h"

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "redforge/campaign_file.h"
#include "redforge/error.h"
#include "redforge/gateway.h"
#include "redforge/report.h"
#include "redforge/run_store.h"
#include "redforge/scenario_lab.h"
#include "redforge/token_store.h"

namespace redforge::cli {
namespace {

// Writes log lines to a stream; used for stderr diagnostics.
class StreamLogSink : public LogSink {
 public:
  StreamLogSink(std::ostream& os, LogLevel min_level) : os_(os), min_level_(min_level) {}

  bool Emit(LogEvent event) override {
    if (event.level < min_level_) return true;
    std::lock_guard lock(mu_);
    os_ << FormatLogLine(event) << '\n';
    return true;
  }
  void Flush() override {
    std::lock_guard lock(mu_);
    os_.flush();
  }

 private:
  std::ostream& os_;
  LogLevel min_level_;
  std::mutex mu_;
};

std::string Env(const CliEnvironment& env, const char* name, std::string fallback) {
  const char* v = env.getenv ? env.getenv(name) : std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

int ErrorExit(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << "\n";
  return code;
}

int CampaignValidate(const std::string& file, std::ostream& out, std::ostream& err) {
  CampaignConfig config;
  try {
    config = LoadCampaignFile(file);
  } catch (const Error& e) {
    return ErrorExit(err, e, e.code() == ErrorCode::kNotFound ? kExitRuntime : kExitValidation);
  }
  const ValidationResult v = ValidateCampaign(config, TargetRegistry{});
  if (!v.ok()) {
    for (const auto& e : v.errors) err << "invalid: " << e << "\n";
    return kExitValidation;
  }
  out << "campaign " << config.id << " is valid ("
      << OrchestratorKindName(config.orchestrator) << ")\n";
  return kExitOk;
}

int CampaignRun(const std::string& file, const std::string& store, const CliEnvironment& env,
                std::ostream& out, std::ostream& err) {
  CampaignConfig config;
  try {
    config = LoadCampaignFile(file);
  } catch (const Error& e) {
    return ErrorExit(err, e, e.code() == ErrorCode::kNotFound ? kExitRuntime : kExitValidation);
  }
  auto log = std::make_shared<StreamLogSink>(err, LogLevel::kWarn);
  EngineOptions options;
  options.store_root = store;
  options.target_factory = env.target_factory;
  options.log = log;
  Engine engine(std::move(options));
  const ValidationResult v = engine.Validate(config);
  if (!v.ok()) {
    for (const auto& e : v.errors) err << "invalid: " << e << "\n";
    return kExitValidation;
  }
  RunResult result;
  try {
    result = engine.Run(config);
  } catch (const Error& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  out << result.record.run_id << "\n";
  if (result.record.status != RunStatus::kCompleted) {
    err << "run " << result.record.run_id << " ended " << ToString(result.record.status);
    if (!result.error.empty()) err << ": " << result.error;
    err << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int RunsList(const std::string& store, std::ostream& out) {
  const auto runs = RunStore(store).ListRuns();
  if (runs.empty()) {
    out << "no runs in " << store << "\n";
    return kExitOk;
  }
  std::vector<std::vector<std::string>> rows = {
      {"run_id", "campaign_id", "status", "done", "total", "errors"}};
  for (const auto& r : runs) {
    rows.push_back({r.run_id, r.campaign_id, std::string(ToString(r.status)),
                    std::to_string(r.counters.conversations_done),
                    std::to_string(r.counters.conversations_total),
                    std::to_string(r.counters.errors)});
  }
  out << FormatTextTable(rows);
  return kExitOk;
}

std::string ValueText(const ScoreValue& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const double* d = std::get_if<double>(&v)) return Json(*d).dump();
  return std::get<std::string>(v);
}

int ResultsShow(const std::string& store, const std::string& run_id, const ScoreFilter& filter,
                const std::string& format, std::ostream& out, std::ostream& err) {
  LoadedRun run;
  try {
    run = RunStore(store).LoadRun(run_id);
  } catch (const Error& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  for (const auto& w : run.warnings) {
    err << "warning: " << w.file << " at byte " << w.byte_offset << ": " << w.message << "\n";
  }
  const auto records = run.Query(filter);
  if (format == "jsonl") {
    for (const auto& r : records) out << Json(r).dump() << "\n";
    return kExitOk;
  }
  std::vector<std::vector<std::string>> rows = {
      {"conversation_id", "target_id", "scorer_id", "value", "correct", "category", "tokens"}};
  for (const auto& r : records) {
    rows.push_back({r.conversation_id, r.target_id, r.scorer_id, ValueText(r.value),
                    r.correct ? (*r.correct ? "true" : "false") : "-",
                    r.category ? std::string(ToString(*r.category)) : "-",
                    std::to_string(r.completion_tokens)});
  }
  out << FormatTextTable(rows);
  return kExitOk;
}

int Report(const std::string& store, const std::string& run_id, ReportFormat format,
           std::ostream& out, std::ostream& err) {
  try {
    out << RenderRunReport(BuildRunReport(RunStore(store).LoadRun(run_id)), format);
  } catch (const Error& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  return kExitOk;
}

int ScenarioGenerate(uint64_t seed, int count, const std::string& library_path,
                     int constructs_per_profile, std::ostream& out, std::ostream& err) {
  try {
    const ConstructLibrary library =
        LoadConstructLibrary(library_path.empty() ? DefaultLibraryPath() : std::filesystem::path(library_path));
    ScenarioOptions options;
    options.constructs_per_profile = constructs_per_profile;
    for (const auto& s : GenerateScenarios(seed, count, library, options)) {
      out << Json(s).dump() << "\n";
    }
  } catch (const Error& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  return kExitOk;
}

int TokenCreate(const std::string& tokens_path, const std::string& role, RateLimit limit,
                const std::string& label, std::ostream& out, std::ostream& err) {
  try {
    TokenStore tokens{std::filesystem::path(tokens_path)};
    const IssuedToken issued = tokens.Create(ParseRole(role), limit, label);
    out << "token_id: " << issued.token.token_id << "\n"
        << "role: " << ToString(issued.token.role) << "\n"
        << "token: " << issued.bearer << "\n";
  } catch (const Error& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  return kExitOk;
}

int Serve(const std::string& store, const std::string& bind_text, const std::string& tokens_path,
          const CliEnvironment& env, std::ostream& out, std::ostream& err) {
  try {
    const BindAddress bind = ParseBindAddress(bind_text);
    TokenStore tokens{std::filesystem::path(tokens_path)};
    if (tokens.size() == 0) {
      err << "warning: token store " << tokens_path
          << " is empty; only /v1/health will answer (see `redforge token create`)\n";
    }
    auto log = std::make_shared<StreamLogSink>(err, LogLevel::kInfo);
    EngineOptions options;
    options.store_root = store;
    options.target_factory = env.target_factory;
    options.log = log;
    Engine engine(std::move(options));
    Gateway gateway(engine, tokens, *log);
    GatewayServer server(gateway, bind);
    out << "listening on " << server.base_url() << std::endl;
    while (server.running() && !(env.stop_requested && env.stop_requested())) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.Stop();
  } catch (const Error& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
           const CliEnvironment& env) {
  CLI::App app{"Red-teaming campaigns, compliance benchmarks and reports", "redforge"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string store = Env(env, "REDFORGE_STORE", "runs");
  app.add_option("--store", store, "Run store root (env REDFORGE_STORE)");

  auto* campaign = app.add_subcommand("campaign", "Validate or run a campaign file");
  campaign->require_subcommand(1);
  std::string campaign_file;
  auto* validate = campaign->add_subcommand("validate", "Check a campaign file");
  validate->add_option("file", campaign_file, "Campaign file")->required();
  auto* run = campaign->add_subcommand("run", "Run a campaign in-process");
  run->add_option("file", campaign_file, "Campaign file")->required();

  auto* runs = app.add_subcommand("runs", "Inspect stored runs");
  runs->require_subcommand(1);
  auto* runs_list = runs->add_subcommand("list", "List runs with status and counters");

  auto* results = app.add_subcommand("results", "Query score records");
  results->require_subcommand(1);
  auto* results_show = results->add_subcommand("show", "Show the score records of a run");
  std::string run_id;
  results_show->add_option("run_id", run_id, "Run id")->required();
  std::string f_target, f_category, f_correct, f_scorer;
  results_show->add_option("--target-id", f_target, "Only this target");
  results_show->add_option("--category", f_category, "Only this MCQ category")
      ->check(CLI::IsMember({"ConstructID", "WhoCompliant", "TeamRisk", "TargetFactor"}));
  results_show->add_option("--correct", f_correct, "Only correct or incorrect answers")
      ->check(CLI::IsMember({"true", "false"}));
  results_show->add_option("--scorer-id", f_scorer, "Only this scorer");
  std::string results_format = "table";
  results_show->add_option("--format", results_format, "table or jsonl")
      ->check(CLI::IsMember({"table", "jsonl"}));

  auto* report = app.add_subcommand("report", "Render a run report");
  report->add_option("run_id", run_id, "Run id")->required();
  std::string report_format = "table";
  report->add_option("--format", report_format, "table or structured")
      ->check(CLI::IsMember({"table", "structured", "json"}));

  auto* scenario = app.add_subcommand("scenario", "Behavioral-compliance scenarios");
  scenario->require_subcommand(1);
  auto* generate = scenario->add_subcommand("generate", "Print generated scenarios as JSON lines");
  uint64_t seed = 0;
  int count = 0;
  std::string library;
  int constructs = 3;
  generate->add_option("--seed", seed, "Generation seed")->required();
  generate->add_option("--count", count, "Number of scenarios")
      ->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--library", library, "Construct library (JSON lines)");
  generate->add_option("--constructs-per-profile", constructs, "Constructs per employee")
      ->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string bind = Env(env, "REDFORGE_BIND", "127.0.0.1:8080");
  std::string tokens_path = Env(env, "REDFORGE_TOKENS", "tokens.json");
  serve->add_option("--bind", bind, "host:port (env REDFORGE_BIND)");
  serve->add_option("--tokens", tokens_path, "Token store file (env REDFORGE_TOKENS)");

  auto* token = app.add_subcommand("token", "Manage API tokens");
  token->require_subcommand(1);
  auto* token_create = token->add_subcommand("create", "Issue a token and print it once");
  std::string role = "viewer";
  std::string label;
  RateLimit limit;
  token_create->add_option("--role", role, "admin, operator or viewer")
      ->check(CLI::IsMember({"admin", "operator", "viewer"}));
  token_create->add_option("--capacity", limit.capacity, "Burst capacity")
      ->check(CLI::PositiveNumber);
  token_create->add_option("--refill-per-minute", limit.refill_per_minute, "Refill rate")
      ->check(CLI::PositiveNumber);
  token_create->add_option("--label", label, "Free-form label");
  token_create->add_option("--tokens", tokens_path, "Token store file (env REDFORGE_TOKENS)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return CampaignValidate(campaign_file, out, err);
    if (run->parsed()) return CampaignRun(campaign_file, store, env, out, err);
    if (runs_list->parsed()) return RunsList(store, out);
    if (results_show->parsed()) {
      ScoreFilter filter;
      if (!f_target.empty()) filter.target_id = f_target;
      if (!f_scorer.empty()) filter.scorer_id = f_scorer;
      if (!f_category.empty()) filter.category = ParseMcqCategory(f_category);
      if (!f_correct.empty()) filter.correct = f_correct == "true";
      return ResultsShow(store, run_id, filter, results_format, out, err);
    }
    if (report->parsed()) return Report(store, run_id, ParseReportFormat(report_format), out, err);
    if (generate->parsed()) return ScenarioGenerate(seed, count, library, constructs, out, err);
    if (serve->parsed()) return Serve(store, bind, tokens_path, env, out, err);
    if (token_create->parsed()) return TokenCreate(tokens_path, role, limit, label, out, err);
  } catch (const std::exception& e) {
    return ErrorExit(err, e, kExitRuntime);
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace redforge::cli
