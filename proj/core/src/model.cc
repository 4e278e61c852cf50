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

#include "redforge/model.h"

#include <cstdio>
#include <ctime>

#include "redforge/error.h"

namespace redforge {
namespace {

template <typename T>
void ReadOpt(const Json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) out = it->get<T>();
}

template <typename T>
void WriteOpt(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void ReadOptional(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) {
    out = it->get<T>();
  } else {
    out.reset();
  }
}

const Json& Require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  }
  return *it;
}

template <typename E, size_t N>
E ParseEnum(std::string_view s, const std::pair<E, std::string_view> (&table)[N],
            const char* what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw Error(ErrorCode::kParse,
              std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E, size_t N>
std::string_view EnumName(E v, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "unknown";
}

constexpr std::pair<MessageRole, std::string_view> kRoles[] = {
    {MessageRole::kSystem, "system"},
    {MessageRole::kUser, "user"},
    {MessageRole::kAssistant, "assistant"}};
constexpr std::pair<FinishReason, std::string_view> kFinish[] = {
    {FinishReason::kStop, "stop"},
    {FinishReason::kLength, "length"},
    {FinishReason::kRefusalFilter, "refusal_filter"},
    {FinishReason::kError, "error"}};
constexpr std::pair<TargetKind, std::string_view> kTargetKinds[] = {
    {TargetKind::kHttpChat, "http_chat"}, {TargetKind::kMock, "mock"}};
constexpr std::pair<McqPolicy, std::string_view> kPolicies[] = {
    {McqPolicy::kAlwaysCorrect, "always_correct"},
    {McqPolicy::kAlwaysWrong, "always_wrong"},
    {McqPolicy::kUniformRandom, "uniform_random"},
    {McqPolicy::kScripted, "scripted"}};
constexpr std::pair<ConverterKind, std::string_view> kConverters[] = {
    {ConverterKind::kIdentity, "identity"},
    {ConverterKind::kUppercase, "uppercase"},
    {ConverterKind::kLeetspeak, "leetspeak"},
    {ConverterKind::kRot13, "rot13"},
    {ConverterKind::kBase64, "base64"},
    {ConverterKind::kPrefixInject, "prefix_inject"},
    {ConverterKind::kSuffixInject, "suffix_inject"},
    {ConverterKind::kTemplate, "template"}};
constexpr std::pair<ScorerKind, std::string_view> kScorers[] = {
    {ScorerKind::kKeyword, "keyword"},
    {ScorerKind::kRefusal, "refusal"},
    {ScorerKind::kMcq, "mcq"},
    {ScorerKind::kLlmJudge, "llm_judge"}};
constexpr std::pair<McqCategory, std::string_view> kCategories[] = {
    {McqCategory::kConstructId, "ConstructID"},
    {McqCategory::kWhoCompliant, "WhoCompliant"},
    {McqCategory::kTeamRisk, "TeamRisk"},
    {McqCategory::kTargetFactor, "TargetFactor"}};
constexpr std::pair<ComplianceLevel, std::string_view> kLevels[] = {
    {ComplianceLevel::kCompliant, "compliant"},
    {ComplianceLevel::kNoncompliant, "noncompliant"}};
constexpr std::pair<RunStatus, std::string_view> kStatuses[] = {
    {RunStatus::kPending, "pending"},
    {RunStatus::kRunning, "running"},
    {RunStatus::kCompleted, "completed"},
    {RunStatus::kFailed, "failed"},
    {RunStatus::kCancelled, "cancelled"}};
constexpr std::pair<LogLevel, std::string_view> kLogLevels[] = {
    {LogLevel::kDebug, "DEBUG"},
    {LogLevel::kInfo, "INFO"},
    {LogLevel::kWarn, "WARN"},
    {LogLevel::kError, "ERROR"},
    {LogLevel::kAudit, "AUDIT"}};

}  // namespace

std::string FormatTimestamp(Timestamp ts) {
  using namespace std::chrono;
  auto ms_total = duration_cast<milliseconds>(ts.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ms_total / 1000);
  int ms = static_cast<int>(ms_total % 1000);
  if (ms < 0) {
    ms += 1000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, ms);
  return buf;
}

Timestamp ParseTimestamp(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  std::string s(text);
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year,
                      &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                      &tm.tm_sec, &ms);
  if (n != 7 || s.size() != 24) {
    throw Error(ErrorCode::kParse, "bad timestamp '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t secs = timegm(&tm);
  return Timestamp(std::chrono::seconds(secs)) + std::chrono::milliseconds(ms);
}

Timestamp NowUtc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

std::vector<std::string> ConversationViolations(const Conversation& c) {
  std::vector<std::string> out;
  for (size_t i = 0; i < c.turns.size(); ++i) {
    const Turn& t = c.turns[i];
    if (t.request.turn_index != static_cast<int>(i)) {
      out.push_back("turn " + std::to_string(i) + " has turn_index " +
                    std::to_string(t.request.turn_index));
    }
    if (t.request.conversation_id != c.id) {
      out.push_back("turn " + std::to_string(i) + " belongs to conversation " +
                    t.request.conversation_id);
    }
    if (t.request.content.find_first_not_of(" \t\r\n") == std::string::npos) {
      out.push_back("turn " + std::to_string(i) + " has empty content");
    }
    if (!t.response && i + 1 < c.turns.size()) {
      out.push_back("turn " + std::to_string(i) + " lacks a response");
    }
  }
  return out;
}

const McqChoice* McqItem::KeyChoice() const {
  for (const auto& c : choices) {
    if (c.label == key) return &c;
  }
  return nullptr;
}

std::string_view OrchestratorKindName(const OrchestratorSpec& spec) {
  switch (spec.index()) {
    case 0: return "sweep";
    case 1: return "adaptive";
    default: return "benchmark";
  }
}

bool IsTerminal(RunStatus status) {
  return status == RunStatus::kCompleted || status == RunStatus::kFailed ||
         status == RunStatus::kCancelled;
}

std::string_view ToString(MessageRole v) { return EnumName(v, kRoles); }
std::string_view ToString(FinishReason v) { return EnumName(v, kFinish); }
std::string_view ToString(TargetKind v) { return EnumName(v, kTargetKinds); }
std::string_view ToString(McqPolicy v) { return EnumName(v, kPolicies); }
std::string_view ToString(ConverterKind v) { return EnumName(v, kConverters); }
std::string_view ToString(ScorerKind v) { return EnumName(v, kScorers); }
std::string_view ToString(McqCategory v) { return EnumName(v, kCategories); }
std::string_view ToString(ComplianceLevel v) { return EnumName(v, kLevels); }
std::string_view ToString(RunStatus v) { return EnumName(v, kStatuses); }
std::string_view ToString(LogLevel v) { return EnumName(v, kLogLevels); }

MessageRole ParseMessageRole(std::string_view s) { return ParseEnum(s, kRoles, "role"); }
FinishReason ParseFinishReason(std::string_view s) { return ParseEnum(s, kFinish, "finish_reason"); }
TargetKind ParseTargetKind(std::string_view s) { return ParseEnum(s, kTargetKinds, "target kind"); }
McqPolicy ParseMcqPolicy(std::string_view s) { return ParseEnum(s, kPolicies, "mcq_policy"); }
ConverterKind ParseConverterKind(std::string_view s) { return ParseEnum(s, kConverters, "converter kind"); }
ScorerKind ParseScorerKind(std::string_view s) { return ParseEnum(s, kScorers, "scorer kind"); }
McqCategory ParseMcqCategory(std::string_view s) { return ParseEnum(s, kCategories, "category"); }
ComplianceLevel ParseComplianceLevel(std::string_view s) { return ParseEnum(s, kLevels, "compliance level"); }
RunStatus ParseRunStatus(std::string_view s) { return ParseEnum(s, kStatuses, "run status"); }
LogLevel ParseLogLevel(std::string_view s) { return ParseEnum(s, kLogLevels, "log level"); }

// --- prompts ---------------------------------------------------------------

void to_json(Json& j, const PromptRequest& v) {
  j = Json{{"id", v.id},
           {"conversation_id", v.conversation_id},
           {"turn_index", v.turn_index},
           {"role", ToString(v.role)},
           {"content", v.content}};
  if (!v.metadata.empty()) j["metadata"] = v.metadata;
}

void from_json(const Json& j, PromptRequest& v) {
  v = PromptRequest{};
  ReadOpt(j, "id", v.id);
  ReadOpt(j, "conversation_id", v.conversation_id);
  ReadOpt(j, "turn_index", v.turn_index);
  if (j.contains("role")) v.role = ParseMessageRole(j.at("role").get<std::string>());
  v.content = Require(j, "content").get<std::string>();
  ReadOpt(j, "metadata", v.metadata);
}

void to_json(Json& j, const PromptResponse& v) {
  j = Json{{"request_id", v.request_id},
           {"content", v.content},
           {"prompt_tokens", v.prompt_tokens},
           {"completion_tokens", v.completion_tokens},
           {"latency_ms", v.latency_ms},
           {"finish_reason", ToString(v.finish_reason)}};
  if (!v.error.empty()) j["error"] = v.error;
}

void from_json(const Json& j, PromptResponse& v) {
  v = PromptResponse{};
  ReadOpt(j, "request_id", v.request_id);
  ReadOpt(j, "content", v.content);
  ReadOpt(j, "prompt_tokens", v.prompt_tokens);
  ReadOpt(j, "completion_tokens", v.completion_tokens);
  ReadOpt(j, "latency_ms", v.latency_ms);
  if (j.contains("finish_reason")) {
    v.finish_reason = ParseFinishReason(j.at("finish_reason").get<std::string>());
  }
  ReadOpt(j, "error", v.error);
}

void to_json(Json& j, const Turn& v) {
  j = Json{{"request", v.request}};
  if (v.response) j["response"] = *v.response;
}

void from_json(const Json& j, Turn& v) {
  v.request = Require(j, "request").get<PromptRequest>();
  ReadOptional(j, "response", v.response);
}

void to_json(Json& j, const Conversation& v) {
  j = Json{{"id", v.id}, {"target_id", v.target_id}, {"turns", v.turns}};
  if (!v.labels.empty()) j["labels"] = v.labels;
}

void from_json(const Json& j, Conversation& v) {
  v = Conversation{};
  v.id = Require(j, "id").get<std::string>();
  ReadOpt(j, "target_id", v.target_id);
  ReadOpt(j, "turns", v.turns);
  ReadOpt(j, "labels", v.labels);
}

// --- targets ---------------------------------------------------------------

void to_json(Json& j, const ReplyRule& v) {
  j = Json{{"contains", v.contains}, {"reply", v.reply}};
}

void from_json(const Json& j, ReplyRule& v) {
  v = ReplyRule{};
  ReadOpt(j, "contains", v.contains);
  v.reply = Require(j, "reply").get<std::string>();
}

void to_json(Json& j, const VulnerabilityProfile& v) {
  j = Json{{"refusal_keywords", v.refusal_keywords},
           {"unlock_prefixes", v.unlock_prefixes},
           {"mcq_policy", ToString(v.mcq_policy)},
           {"verbosity_tokens",
            {{"correct", v.verbosity_correct}, {"incorrect", v.verbosity_incorrect}}},
           {"seed", v.seed}};
  if (!v.scripted.empty()) j["scripted"] = v.scripted;
  if (!v.reply_rules.empty()) j["reply_rules"] = v.reply_rules;
}

void from_json(const Json& j, VulnerabilityProfile& v) {
  v = VulnerabilityProfile{};
  ReadOpt(j, "refusal_keywords", v.refusal_keywords);
  ReadOpt(j, "unlock_prefixes", v.unlock_prefixes);
  if (j.contains("mcq_policy")) {
    v.mcq_policy = ParseMcqPolicy(j.at("mcq_policy").get<std::string>());
  }
  ReadOpt(j, "scripted", v.scripted);
  if (auto it = j.find("verbosity_tokens"); it != j.end()) {
    ReadOpt(*it, "correct", v.verbosity_correct);
    ReadOpt(*it, "incorrect", v.verbosity_incorrect);
  }
  ReadOpt(j, "reply_rules", v.reply_rules);
  ReadOpt(j, "seed", v.seed);
}

void to_json(Json& j, const TargetSpec& v) {
  j = Json{{"id", v.id},
           {"kind", ToString(v.kind)},
           {"model_name", v.model_name},
           {"temperature", v.temperature},
           {"max_tokens", v.max_tokens},
           {"timeout_ms", v.timeout_ms},
           {"retry",
            {{"max_attempts", v.retry.max_attempts},
             {"base_backoff_ms", v.retry.base_backoff_ms}}}};
  if (v.kind == TargetKind::kHttpChat) {
    j["endpoint_url"] = v.endpoint_url;
    j["credential_ref"] = v.credential_ref;
  } else {
    j["profile"] = v.profile;
  }
}

void from_json(const Json& j, TargetSpec& v) {
  v = TargetSpec{};
  v.id = Require(j, "id").get<std::string>();
  v.kind = ParseTargetKind(Require(j, "kind").get<std::string>());
  ReadOpt(j, "endpoint_url", v.endpoint_url);
  ReadOpt(j, "model_name", v.model_name);
  ReadOpt(j, "credential_ref", v.credential_ref);
  ReadOpt(j, "temperature", v.temperature);
  ReadOpt(j, "max_tokens", v.max_tokens);
  ReadOpt(j, "timeout_ms", v.timeout_ms);
  if (auto it = j.find("retry"); it != j.end()) {
    ReadOpt(*it, "max_attempts", v.retry.max_attempts);
    ReadOpt(*it, "base_backoff_ms", v.retry.base_backoff_ms);
  }
  ReadOpt(j, "profile", v.profile);
}

// --- converters ------------------------------------------------------------

void to_json(Json& j, const ConverterSpec& v) {
  j = Json{{"kind", ToString(v.kind)}};
  if (!v.params.empty()) j["params"] = v.params;
}

void from_json(const Json& j, ConverterSpec& v) {
  v = ConverterSpec{};
  v.kind = ParseConverterKind(Require(j, "kind").get<std::string>());
  ReadOpt(j, "params", v.params);
}

void to_json(Json& j, const ConverterChain& v) {
  j = Json{{"id", v.id}, {"steps", v.steps}};
}

void from_json(const Json& j, ConverterChain& v) {
  v = ConverterChain{};
  ReadOpt(j, "id", v.id);
  ReadOpt(j, "steps", v.steps);
}

// --- scoring ---------------------------------------------------------------

void to_json(Json& j, const ScorerSpec& v) {
  j = Json{{"id", v.id}, {"kind", ToString(v.kind)}};
  if (!v.keywords.empty()) j["keywords"] = v.keywords;
  if (!v.lexicon.empty()) j["lexicon"] = v.lexicon;
  if (!v.judge_target.empty()) j["judge_target"] = v.judge_target;
  if (!v.rubric.empty()) j["rubric"] = v.rubric;
  if (v.invert) j["invert"] = true;
}

void from_json(const Json& j, ScorerSpec& v) {
  v = ScorerSpec{};
  v.id = Require(j, "id").get<std::string>();
  v.kind = ParseScorerKind(Require(j, "kind").get<std::string>());
  ReadOpt(j, "keywords", v.keywords);
  ReadOpt(j, "lexicon", v.lexicon);
  ReadOpt(j, "judge_target", v.judge_target);
  ReadOpt(j, "rubric", v.rubric);
  ReadOpt(j, "invert", v.invert);
}

void to_json(Json& j, const ScoreRecord& v) {
  j = Json{{"id", v.id},
           {"conversation_id", v.conversation_id},
           {"scorer_id", v.scorer_id},
           {"target_id", v.target_id},
           {"completion_tokens", v.completion_tokens}};
  std::visit([&](const auto& x) { j["value"] = x; }, v.value);
  WriteOpt(j, "correct", v.correct);
  if (v.category) j["category"] = ToString(*v.category);
  WriteOpt(j, "rationale", v.rationale);
  if (v.unparseable) j["unparseable"] = true;
  WriteOpt(j, "answer", v.answer);
  if (!v.scenario_id.empty()) j["scenario_id"] = v.scenario_id;
  if (v.item_index >= 0) j["item_index"] = v.item_index;
  if (v.trial >= 0) j["trial"] = v.trial;
}

void from_json(const Json& j, ScoreRecord& v) {
  v = ScoreRecord{};
  v.id = Require(j, "id").get<std::string>();
  ReadOpt(j, "conversation_id", v.conversation_id);
  ReadOpt(j, "scorer_id", v.scorer_id);
  ReadOpt(j, "target_id", v.target_id);
  ReadOpt(j, "completion_tokens", v.completion_tokens);
  const Json& value = Require(j, "value");
  if (value.is_boolean()) {
    v.value = value.get<bool>();
  } else if (value.is_number()) {
    v.value = value.get<double>();
  } else if (value.is_string()) {
    v.value = value.get<std::string>();
  } else {
    throw Error(ErrorCode::kParse, "score value must be boolean, number or string");
  }
  ReadOptional(j, "correct", v.correct);
  if (j.contains("category")) {
    v.category = ParseMcqCategory(j.at("category").get<std::string>());
  }
  ReadOptional(j, "rationale", v.rationale);
  ReadOpt(j, "unparseable", v.unparseable);
  ReadOptional(j, "answer", v.answer);
  ReadOpt(j, "scenario_id", v.scenario_id);
  ReadOpt(j, "item_index", v.item_index);
  ReadOpt(j, "trial", v.trial);
}

void to_json(Json& j, const MetricReport& v) {
  Json cats = Json::object();
  for (const auto& [cat, acc] : v.categorical_accuracy) cats[std::string(ToString(cat))] = acc;
  j = Json{{"target_id", v.target_id},
           {"n_questions", v.n_questions},
           {"overall_accuracy", v.overall_accuracy},
           {"categorical_accuracy", cats},
           {"wastefulness", v.wastefulness},
           {"consistency", v.consistency ? Json(*v.consistency) : Json(nullptr)},
           {"unparseable_count", v.unparseable_count}};
  WriteOpt(j, "tokens_per_incorrect", v.tokens_per_incorrect);
}

void from_json(const Json& j, MetricReport& v) {
  v = MetricReport{};
  v.target_id = Require(j, "target_id").get<std::string>();
  ReadOpt(j, "n_questions", v.n_questions);
  ReadOpt(j, "overall_accuracy", v.overall_accuracy);
  if (auto it = j.find("categorical_accuracy"); it != j.end()) {
    for (const auto& [name, acc] : it->items()) {
      v.categorical_accuracy[ParseMcqCategory(name)] = acc.get<double>();
    }
  }
  ReadOpt(j, "wastefulness", v.wastefulness);
  ReadOptional(j, "consistency", v.consistency);
  ReadOpt(j, "unparseable_count", v.unparseable_count);
  ReadOptional(j, "tokens_per_incorrect", v.tokens_per_incorrect);
}

// --- scenarios -------------------------------------------------------------

void to_json(Json& j, const CognitiveConstruct& v) {
  j = Json{{"name", v.name},
           {"theory", v.theory},
           {"compliant_statement", v.compliant_statement},
           {"noncompliant_statement", v.noncompliant_statement}};
}

void from_json(const Json& j, CognitiveConstruct& v) {
  v.name = Require(j, "name").get<std::string>();
  v.theory = Require(j, "theory").get<std::string>();
  v.compliant_statement = Require(j, "compliant_statement").get<std::string>();
  v.noncompliant_statement = Require(j, "noncompliant_statement").get<std::string>();
}

void to_json(Json& j, const ConstructAssignment& v) {
  j = Json{{"construct", v.construct}, {"level", ToString(v.level)}};
}

void from_json(const Json& j, ConstructAssignment& v) {
  v.construct = Require(j, "construct").get<std::string>();
  v.level = ParseComplianceLevel(Require(j, "level").get<std::string>());
}

void to_json(Json& j, const CognitiveProfile& v) {
  j = Json{{"employee_name", v.employee_name},
           {"assignments", v.assignments},
           {"compliance_label", ToString(v.compliance_label)}};
}

void from_json(const Json& j, CognitiveProfile& v) {
  v.employee_name = Require(j, "employee_name").get<std::string>();
  v.assignments = Require(j, "assignments").get<std::vector<ConstructAssignment>>();
  v.compliance_label =
      ParseComplianceLevel(Require(j, "compliance_label").get<std::string>());
}

void to_json(Json& j, const McqChoice& v) {
  j = Json{{"label", v.label}, {"text", v.text}};
}

void from_json(const Json& j, McqChoice& v) {
  v.label = Require(j, "label").get<std::string>();
  v.text = Require(j, "text").get<std::string>();
}

void to_json(Json& j, const McqItem& v) {
  j = Json{{"category", ToString(v.category)},
           {"stem", v.stem},
           {"choices", v.choices},
           {"key", v.key},
           {"shuffle_seed", v.shuffle_seed}};
}

void from_json(const Json& j, McqItem& v) {
  v.category = ParseMcqCategory(Require(j, "category").get<std::string>());
  v.stem = Require(j, "stem").get<std::string>();
  v.choices = Require(j, "choices").get<std::vector<McqChoice>>();
  v.key = Require(j, "key").get<std::string>();
  ReadOpt(j, "shuffle_seed", v.shuffle_seed);
}

void to_json(Json& j, const Scenario& v) {
  j = Json{{"id", v.id},
           {"seed", v.seed},
           {"profiles", v.profiles},
           {"vignette", v.vignette},
           {"battery", v.battery}};
  WriteOpt(j, "original_vignette", v.original_vignette);
}

void from_json(const Json& j, Scenario& v) {
  v = Scenario{};
  v.id = Require(j, "id").get<std::string>();
  ReadOpt(j, "seed", v.seed);
  v.profiles = Require(j, "profiles").get<std::vector<CognitiveProfile>>();
  v.vignette = Require(j, "vignette").get<std::string>();
  ReadOptional(j, "original_vignette", v.original_vignette);
  ReadOpt(j, "battery", v.battery);
}

// --- campaigns -------------------------------------------------------------

void to_json(Json& j, const Dataset& v) {
  j = Json::object();
  if (!v.name.empty()) j["name"] = v.name;
  if (!v.path.empty()) j["path"] = v.path;
  if (!v.prompts.empty()) j["prompts"] = v.prompts;
}

void from_json(const Json& j, Dataset& v) {
  v = Dataset{};
  ReadOpt(j, "name", v.name);
  ReadOpt(j, "path", v.path);
  ReadOpt(j, "prompts", v.prompts);
}

void to_json(Json& j, const OrchestratorSpec& v) {
  if (const auto* a = std::get_if<AdaptiveParams>(&v)) {
    j = Json{{"kind", "adaptive"},
             {"goal", a->goal},
             {"attacker", a->attacker},
             {"defender", a->defender},
             {"success_scorer", a->success_scorer},
             {"max_turns", a->max_turns}};
  } else if (const auto* b = std::get_if<BenchmarkParams>(&v)) {
    j = Json{{"kind", "benchmark"},
             {"scenario_count", b->scenario_count},
             {"trials_per_scenario", b->trials_per_scenario},
             {"library", b->library_ref},
             {"constructs_per_profile", b->constructs_per_profile}};
    if (!b->paraphrase_target.empty()) j["paraphrase_target"] = b->paraphrase_target;
  } else {
    j = Json{{"kind", "sweep"}};
  }
}

void from_json(const Json& j, OrchestratorSpec& v) {
  const std::string kind = Require(j, "kind").get<std::string>();
  if (kind == "sweep") {
    v = SweepParams{};
  } else if (kind == "adaptive") {
    AdaptiveParams a;
    ReadOpt(j, "goal", a.goal);
    ReadOpt(j, "attacker", a.attacker);
    ReadOpt(j, "defender", a.defender);
    ReadOpt(j, "success_scorer", a.success_scorer);
    ReadOpt(j, "max_turns", a.max_turns);
    v = a;
  } else if (kind == "benchmark") {
    BenchmarkParams b;
    ReadOpt(j, "scenario_count", b.scenario_count);
    ReadOpt(j, "trials_per_scenario", b.trials_per_scenario);
    ReadOpt(j, "library", b.library_ref);
    ReadOpt(j, "constructs_per_profile", b.constructs_per_profile);
    ReadOpt(j, "paraphrase_target", b.paraphrase_target);
    v = b;
  } else {
    throw Error(ErrorCode::kParse, "unknown orchestrator kind '" + kind + "'");
  }
}

void to_json(Json& j, const CampaignConfig& v) {
  j = Json{{"id", v.id},
           {"targets", v.targets},
           {"target_ids", v.target_ids},
           {"dataset", v.dataset},
           {"converter_chains", v.converter_chains},
           {"scorers", v.scorers},
           {"orchestrator", v.orchestrator},
           {"seed", v.seed},
           {"max_concurrency", v.max_concurrency}};
}

void from_json(const Json& j, CampaignConfig& v) {
  v = CampaignConfig{};
  v.id = Require(j, "id").get<std::string>();
  ReadOpt(j, "targets", v.targets);
  ReadOpt(j, "target_ids", v.target_ids);
  ReadOpt(j, "dataset", v.dataset);
  ReadOpt(j, "converter_chains", v.converter_chains);
  ReadOpt(j, "scorers", v.scorers);
  if (j.contains("orchestrator")) v.orchestrator = j.at("orchestrator").get<OrchestratorSpec>();
  ReadOpt(j, "seed", v.seed);
  ReadOpt(j, "max_concurrency", v.max_concurrency);
}

void to_json(Json& j, const RunRecord& v) {
  j = Json{{"run_id", v.run_id},
           {"campaign_id", v.campaign_id},
           {"status", ToString(v.status)},
           {"counters",
            {{"conversations_total", v.counters.conversations_total},
             {"conversations_done", v.counters.conversations_done},
             {"errors", v.counters.errors}}}};
  if (v.started_at) j["started_at"] = FormatTimestamp(*v.started_at);
  if (v.ended_at) j["ended_at"] = FormatTimestamp(*v.ended_at);
}

void from_json(const Json& j, RunRecord& v) {
  v = RunRecord{};
  v.run_id = Require(j, "run_id").get<std::string>();
  ReadOpt(j, "campaign_id", v.campaign_id);
  v.status = ParseRunStatus(Require(j, "status").get<std::string>());
  if (auto it = j.find("counters"); it != j.end()) {
    ReadOpt(*it, "conversations_total", v.counters.conversations_total);
    ReadOpt(*it, "conversations_done", v.counters.conversations_done);
    ReadOpt(*it, "errors", v.counters.errors);
  }
  if (j.contains("started_at")) v.started_at = ParseTimestamp(j.at("started_at").get<std::string>());
  if (j.contains("ended_at")) v.ended_at = ParseTimestamp(j.at("ended_at").get<std::string>());
}

void to_json(Json& j, const LogEvent& v) {
  j = Json::object();
  for (const auto& [k, val] : v.fields) j[k] = val;
  j["ts"] = FormatTimestamp(v.timestamp);
  j["level"] = ToString(v.level);
  j["component"] = v.component;
  j["msg"] = v.message;
}

void from_json(const Json& j, LogEvent& v) {
  v = LogEvent{};
  for (const auto& [k, val] : j.items()) {
    if (k == "ts") {
      v.timestamp = ParseTimestamp(val.get<std::string>());
    } else if (k == "level") {
      v.level = ParseLogLevel(val.get<std::string>());
    } else if (k == "component") {
      v.component = val.get<std::string>();
    } else if (k == "msg") {
      v.message = val.get<std::string>();
    } else {
      v.fields[k] = val.is_string() ? val.get<std::string>() : val.dump();
    }
  }
}

}  // namespace redforge
