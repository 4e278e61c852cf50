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

// Shared domain types for campaigns, conversations, scores and runs, plus
// their JSON encodings. Every type here is a plain value; nothing holds
// shared mutable state.

#ifndef REDFORGE_MODEL_H_
#define REDFORGE_MODEL_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace redforge {

using Json = nlohmann::json;
using StringMap = std::map<std::string, std::string>;
using Timestamp = std::chrono::system_clock::time_point;

// RFC 3339, UTC, millisecond precision: 2026-10-15T08:30:00.123Z
std::string FormatTimestamp(Timestamp ts);
Timestamp ParseTimestamp(std::string_view text);
Timestamp NowUtc();

// ---------------------------------------------------------------------------
// Prompts and conversations

enum class MessageRole { kSystem, kUser, kAssistant };
enum class FinishReason { kStop, kLength, kRefusalFilter, kError };

struct PromptRequest {
  std::string id;
  std::string conversation_id;
  int turn_index = 0;
  MessageRole role = MessageRole::kUser;
  std::string content;
  StringMap metadata;

  bool operator==(const PromptRequest&) const = default;
};

struct PromptResponse {
  std::string request_id;
  std::string content;
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
  int64_t latency_ms = 0;
  FinishReason finish_reason = FinishReason::kStop;
  // Set when finish_reason == kError.
  std::string error;

  bool operator==(const PromptResponse&) const = default;
};

struct Turn {
  PromptRequest request;
  std::optional<PromptResponse> response;

  bool operator==(const Turn&) const = default;
};

struct Conversation {
  std::string id;
  std::string target_id;
  std::vector<Turn> turns;
  StringMap labels;

  bool operator==(const Conversation&) const = default;
};

// Empty when the conversation satisfies its invariants (consecutive turn
// indices from 0, matching conversation ids, non-empty request content, only
// the last turn may lack a response).
std::vector<std::string> ConversationViolations(const Conversation& c);

// ---------------------------------------------------------------------------
// Targets

enum class TargetKind { kHttpChat, kMock };
enum class McqPolicy { kAlwaysCorrect, kAlwaysWrong, kUniformRandom, kScripted };

struct ReplyRule {
  // Empty `contains` matches every request.
  std::string contains;
  std::string reply;

  bool operator==(const ReplyRule&) const = default;
};

struct VulnerabilityProfile {
  std::vector<std::string> refusal_keywords;
  std::vector<std::string> unlock_prefixes;
  McqPolicy mcq_policy = McqPolicy::kUniformRandom;
  // MCQ fingerprint -> label chosen under the scripted policy.
  StringMap scripted;
  // MCQ fingerprint -> correct label. Filled at run time by the benchmark
  // orchestrator; never read from or written to config files.
  StringMap answer_keys;
  int64_t verbosity_correct = 2;
  int64_t verbosity_incorrect = 2;
  std::vector<ReplyRule> reply_rules;
  uint64_t seed = 0;

  bool operator==(const VulnerabilityProfile&) const = default;
};

struct RetryPolicy {
  int max_attempts = 3;
  int base_backoff_ms = 250;

  bool operator==(const RetryPolicy&) const = default;
};

struct TargetSpec {
  std::string id;
  TargetKind kind = TargetKind::kMock;
  std::string endpoint_url;
  std::string model_name;
  // Name of the environment variable holding the bearer secret. The secret
  // itself is never stored.
  std::string credential_ref;
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_ms = 30000;
  RetryPolicy retry;
  VulnerabilityProfile profile;

  bool operator==(const TargetSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Converters

enum class ConverterKind {
  kIdentity,
  kUppercase,
  kLeetspeak,
  kRot13,
  kBase64,
  kPrefixInject,
  kSuffixInject,
  kTemplate,
};

struct ConverterSpec {
  ConverterKind kind = ConverterKind::kIdentity;
  // prefix_inject/suffix_inject: {"text"}. template: {"template"} plus one
  // entry per bound variable; `prompt` is bound to the input automatically.
  StringMap params;

  bool operator==(const ConverterSpec&) const = default;
};

struct ConverterChain {
  std::string id;
  std::vector<ConverterSpec> steps;

  bool operator==(const ConverterChain&) const = default;
};

// ---------------------------------------------------------------------------
// Scorers, score records, metric reports

enum class ScorerKind { kKeyword, kRefusal, kMcq, kLlmJudge };

struct ScorerSpec {
  std::string id;
  ScorerKind kind = ScorerKind::kRefusal;
  std::vector<std::string> keywords;
  // Overrides the default refusal lexicon when non-empty.
  std::vector<std::string> lexicon;
  std::string judge_target;
  std::string rubric;
  // Boolean scorers only: report the negated verdict.
  bool invert = false;

  bool operator==(const ScorerSpec&) const = default;
};

enum class McqCategory { kConstructId, kWhoCompliant, kTeamRisk, kTargetFactor };

inline constexpr McqCategory kAllCategories[] = {
    McqCategory::kConstructId, McqCategory::kWhoCompliant,
    McqCategory::kTeamRisk, McqCategory::kTargetFactor};

using ScoreValue = std::variant<bool, double, std::string>;

struct ScoreRecord {
  std::string id;
  std::string conversation_id;
  std::string scorer_id;
  std::string target_id;
  ScoreValue value = false;
  std::optional<bool> correct;
  std::optional<McqCategory> category;
  int64_t completion_tokens = 0;
  std::optional<std::string> rationale;
  // MCQ bookkeeping.
  bool unparseable = false;
  std::optional<std::string> answer;
  std::string scenario_id;
  int item_index = -1;
  int trial = -1;

  bool operator==(const ScoreRecord&) const = default;
};

struct MetricReport {
  std::string target_id;
  int64_t n_questions = 0;
  double overall_accuracy = 0.0;
  std::map<McqCategory, double> categorical_accuracy;
  double wastefulness = 0.0;
  // Absent when no group had two or more trials.
  std::optional<double> consistency;
  int64_t unparseable_count = 0;
  // Mean completion tokens per incorrect answer; absent with no incorrect.
  std::optional<double> tokens_per_incorrect;

  bool operator==(const MetricReport&) const = default;
};

// ---------------------------------------------------------------------------
// Behavioral-compliance scenarios

enum class ComplianceLevel { kCompliant, kNoncompliant };

struct CognitiveConstruct {
  std::string name;
  std::string theory;
  std::string compliant_statement;
  std::string noncompliant_statement;

  bool operator==(const CognitiveConstruct&) const = default;
};

struct ConstructAssignment {
  std::string construct;
  ComplianceLevel level = ComplianceLevel::kCompliant;

  bool operator==(const ConstructAssignment&) const = default;
};

struct CognitiveProfile {
  std::string employee_name;
  std::vector<ConstructAssignment> assignments;
  ComplianceLevel compliance_label = ComplianceLevel::kCompliant;

  bool operator==(const CognitiveProfile&) const = default;
};

struct McqChoice {
  std::string label;
  std::string text;

  bool operator==(const McqChoice&) const = default;
};

struct McqItem {
  McqCategory category = McqCategory::kConstructId;
  std::string stem;
  std::vector<McqChoice> choices;
  std::string key;
  uint64_t shuffle_seed = 0;

  const McqChoice* KeyChoice() const;
  bool operator==(const McqItem&) const = default;
};

struct Scenario {
  std::string id;
  std::vector<CognitiveProfile> profiles;
  std::string vignette;
  // Template text kept when a paraphrase replaced the vignette.
  std::optional<std::string> original_vignette;
  std::vector<McqItem> battery;
  uint64_t seed = 0;

  bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------------------
// Campaigns and runs

struct Dataset {
  std::string name;
  // Either a path to a prompt file (one prompt per line) or inline prompts.
  std::string path;
  std::vector<std::string> prompts;

  bool operator==(const Dataset&) const = default;
};

struct SweepParams {
  bool operator==(const SweepParams&) const = default;
};

struct AdaptiveParams {
  std::string goal;
  std::string attacker;
  std::string defender;
  std::string success_scorer;
  int max_turns = 5;

  bool operator==(const AdaptiveParams&) const = default;
};

struct BenchmarkParams {
  int scenario_count = 5;
  int trials_per_scenario = 1;
  std::string library_ref;
  int constructs_per_profile = 3;
  // Optional target used to reword vignettes.
  std::string paraphrase_target;

  bool operator==(const BenchmarkParams&) const = default;
};

using OrchestratorSpec = std::variant<SweepParams, AdaptiveParams, BenchmarkParams>;

std::string_view OrchestratorKindName(const OrchestratorSpec& spec);

struct CampaignConfig {
  std::string id;
  // Target definitions carried by the campaign document. Targets may also
  // come from a registry, so this can be empty.
  std::vector<TargetSpec> targets;
  std::vector<std::string> target_ids;
  Dataset dataset;
  std::vector<ConverterChain> converter_chains;
  std::vector<ScorerSpec> scorers;
  OrchestratorSpec orchestrator = SweepParams{};
  uint64_t seed = 0;
  int max_concurrency = 1;

  bool operator==(const CampaignConfig&) const = default;
};

enum class RunStatus { kPending, kRunning, kCompleted, kFailed, kCancelled };

bool IsTerminal(RunStatus status);

struct RunCounters {
  int64_t conversations_total = 0;
  int64_t conversations_done = 0;
  int64_t errors = 0;

  bool operator==(const RunCounters&) const = default;
};

struct RunRecord {
  std::string run_id;
  std::string campaign_id;
  RunStatus status = RunStatus::kPending;
  std::optional<Timestamp> started_at;
  std::optional<Timestamp> ended_at;
  RunCounters counters;

  bool operator==(const RunRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Structured logging

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kAudit = 4 };

struct LogEvent {
  Timestamp timestamp{};
  LogLevel level = LogLevel::kInfo;
  std::string component;
  std::string message;
  StringMap fields;

  bool operator==(const LogEvent&) const = default;
};

// ---------------------------------------------------------------------------
// Enum <-> string

std::string_view ToString(MessageRole v);
std::string_view ToString(FinishReason v);
std::string_view ToString(TargetKind v);
std::string_view ToString(McqPolicy v);
std::string_view ToString(ConverterKind v);
std::string_view ToString(ScorerKind v);
std::string_view ToString(McqCategory v);
std::string_view ToString(ComplianceLevel v);
std::string_view ToString(RunStatus v);
std::string_view ToString(LogLevel v);

// Parsers throw Error(kParse) on unknown names.
MessageRole ParseMessageRole(std::string_view s);
FinishReason ParseFinishReason(std::string_view s);
TargetKind ParseTargetKind(std::string_view s);
McqPolicy ParseMcqPolicy(std::string_view s);
ConverterKind ParseConverterKind(std::string_view s);
ScorerKind ParseScorerKind(std::string_view s);
McqCategory ParseMcqCategory(std::string_view s);
ComplianceLevel ParseComplianceLevel(std::string_view s);
RunStatus ParseRunStatus(std::string_view s);
LogLevel ParseLogLevel(std::string_view s);

// ---------------------------------------------------------------------------
// JSON encodings (nlohmann ADL hooks).

void to_json(Json& j, const PromptRequest& v);
void from_json(const Json& j, PromptRequest& v);
void to_json(Json& j, const PromptResponse& v);
void from_json(const Json& j, PromptResponse& v);
void to_json(Json& j, const Turn& v);
void from_json(const Json& j, Turn& v);
void to_json(Json& j, const Conversation& v);
void from_json(const Json& j, Conversation& v);
void to_json(Json& j, const ReplyRule& v);
void from_json(const Json& j, ReplyRule& v);
void to_json(Json& j, const VulnerabilityProfile& v);
void from_json(const Json& j, VulnerabilityProfile& v);
void to_json(Json& j, const TargetSpec& v);
void from_json(const Json& j, TargetSpec& v);
void to_json(Json& j, const ConverterSpec& v);
void from_json(const Json& j, ConverterSpec& v);
void to_json(Json& j, const ConverterChain& v);
void from_json(const Json& j, ConverterChain& v);
void to_json(Json& j, const ScorerSpec& v);
void from_json(const Json& j, ScorerSpec& v);
void to_json(Json& j, const ScoreRecord& v);
void from_json(const Json& j, ScoreRecord& v);
void to_json(Json& j, const MetricReport& v);
void from_json(const Json& j, MetricReport& v);
void to_json(Json& j, const CognitiveConstruct& v);
void from_json(const Json& j, CognitiveConstruct& v);
void to_json(Json& j, const ConstructAssignment& v);
void from_json(const Json& j, ConstructAssignment& v);
void to_json(Json& j, const CognitiveProfile& v);
void from_json(const Json& j, CognitiveProfile& v);
void to_json(Json& j, const McqChoice& v);
void from_json(const Json& j, McqChoice& v);
void to_json(Json& j, const McqItem& v);
void from_json(const Json& j, McqItem& v);
void to_json(Json& j, const Scenario& v);
void from_json(const Json& j, Scenario& v);
void to_json(Json& j, const Dataset& v);
void from_json(const Json& j, Dataset& v);
void to_json(Json& j, const OrchestratorSpec& v);
void from_json(const Json& j, OrchestratorSpec& v);
void to_json(Json& j, const CampaignConfig& v);
void from_json(const Json& j, CampaignConfig& v);
void to_json(Json& j, const RunRecord& v);
void from_json(const Json& j, RunRecord& v);
void to_json(Json& j, const LogEvent& v);
void from_json(const Json& j, LogEvent& v);

}  // namespace redforge

#endif  // REDFORGE_MODEL_H_
