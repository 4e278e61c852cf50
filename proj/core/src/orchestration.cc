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

#include "redforge/orchestration.h"

#include <algorithm>
#include <condition_variable>
#include <exception>

#include "redforge/error.h"
#include "redforge/ids.h"
#include "redforge/scoring.h"
#include "redforge/transforms.h"

namespace redforge {
namespace {

struct ItemResult {
  Conversation conversation;
  std::vector<ScoreRecord> scores;
  bool errored = false;
};

// Writes completed items to the store in plan order, whatever order the
// workers finish them in.
class OrderedCommitter {
 public:
  OrderedCommitter(size_t n, RunContext& ctx, RunResult& result)
      : slots_(n), ctx_(ctx), result_(result) {}

  void Complete(size_t index, ItemResult item) {
    std::lock_guard lock(mu_);
    slots_[index] = std::move(item);
    while (next_ < slots_.size() && slots_[next_]) {
      Write(*slots_[next_]);
      slots_[next_].reset();
      ++next_;
    }
  }

  // Commits whatever finished beyond a gap left by cancellation.
  void Drain() {
    std::lock_guard lock(mu_);
    for (; next_ < slots_.size(); ++next_) {
      if (slots_[next_]) {
        Write(*slots_[next_]);
        slots_[next_].reset();
      }
    }
  }

 private:
  void Write(ItemResult& item) {
    ctx_.handle->AppendConversation(item.conversation);
    for (const auto& s : item.scores) ctx_.handle->AppendScore(s);
    ctx_.progress->done.fetch_add(1);
    if (item.errored) ctx_.progress->errors.fetch_add(1);
    result_.conversations.push_back(std::move(item.conversation));
    for (auto& s : item.scores) result_.scores.push_back(std::move(s));
  }

  std::mutex mu_;
  std::vector<std::optional<ItemResult>> slots_;
  size_t next_ = 0;
  RunContext& ctx_;
  RunResult& result_;
};

// Bounded pool: `concurrency` workers pull job indices until the plan is
// exhausted, the run is cancelled, or a job throws (store failure).
void RunPool(size_t n, int concurrency, RunProgress& progress,
             const std::function<void(size_t)>& job) {
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      if (progress.cancel.load() || abort.load()) return;
      size_t idx = next.fetch_add(1);
      if (idx >= n) return;
      try {
        job(idx);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        abort.store(true);
        return;
      }
    }
  };
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, concurrency)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

const TargetSpec& LookupTarget(const RunContext& ctx, const std::string& id) {
  auto it = ctx.targets.find(id);
  if (it == ctx.targets.end()) throw Error(ErrorCode::kNotFound, "target " + id + " not registered");
  return it->second;
}

const ScorerSpec& LookupScorer(const RunContext& ctx, const std::string& id) {
  for (const auto& s : ctx.scorers) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::kNotFound, "scorer " + id + " not defined");
}

void Log(const RunContext& ctx, LogLevel level, std::string message, StringMap fields = {}) {
  if (ctx.log == nullptr) return;
  fields["run_id"] = ctx.run_id;
  ctx.log->Emit(MakeEvent(level, "orchestration", std::move(message), std::move(fields)));
}

PromptRequest NewRequest(const Conversation& conv, std::string content) {
  PromptRequest req;
  req.id = NewId();
  req.conversation_id = conv.id;
  req.turn_index = static_cast<int>(conv.turns.size());
  req.role = MessageRole::kUser;
  req.content = std::move(content);
  return req;
}

PromptResponse ErrorResponse(const PromptRequest& req, const std::string& message) {
  PromptResponse resp;
  resp.request_id = req.id;
  resp.finish_reason = FinishReason::kError;
  resp.error = message;
  return resp;
}

// Sends one request; failures come back as an error response.
PromptResponse SendOrError(const RunContext& ctx, const std::string& target_id,
                           const Conversation& conv, const PromptRequest& req,
                           std::string* error) {
  try {
    auto target = ctx.make_target(LookupTarget(ctx, target_id));
    return target->Send(conv, req);
  } catch (const std::exception& e) {
    *error = e.what();
    return ErrorResponse(req, e.what());
  }
}

// Applies keyword/refusal/judge scorers; MCQ scorers are handled by the
// benchmark itself.
void ApplyResponseScorers(const RunContext& ctx, const std::vector<std::string>& scorer_ids,
                          const Conversation& conv, const PromptResponse& resp,
                          std::vector<ScoreRecord>& out) {
  for (const auto& id : scorer_ids) {
    const ScorerSpec& spec = LookupScorer(ctx, id);
    ScoreRecord record;
    if (spec.kind == ScorerKind::kKeyword || spec.kind == ScorerKind::kRefusal) {
      record = ApplyBooleanScorer(spec, resp);
    } else if (spec.kind == ScorerKind::kLlmJudge) {
      try {
        auto judge = ctx.make_target(LookupTarget(ctx, spec.judge_target));
        record = ScoreLlmJudge(*judge, spec.rubric, conv);
      } catch (const std::exception& e) {
        Log(ctx, LogLevel::kError, "judge scoring failed",
            {{"conversation_id", conv.id}, {"scorer_id", spec.id}, {"error", e.what()}});
        continue;
      }
    } else {
      continue;
    }
    record.scorer_id = spec.id;
    record.conversation_id = conv.id;
    record.target_id = conv.target_id;
    out.push_back(std::move(record));
  }
}

std::string TranscriptText(const Conversation& conv) {
  if (conv.turns.empty()) return "(no turns yet)";
  std::string out;
  for (const auto& t : conv.turns) {
    const std::string turn = std::to_string(t.request.turn_index + 1);
    out += "Turn " + turn + " attacker: " + t.request.content + "\n";
    out += "Turn " + turn + " defender: " +
           (t.response ? (t.response->finish_reason == FinishReason::kError
                              ? "(error: " + t.response->error + ")"
                              : t.response->content)
                       : std::string("(no reply)")) +
           "\n";
  }
  out.pop_back();
  return out;
}

std::vector<std::string> AllScorerIds(const RunContext& ctx) {
  std::vector<std::string> ids;
  for (const auto& s : ctx.scorers) ids.push_back(s.id);
  return ids;
}

}  // namespace

int64_t PlannedConversations(const SweepPlan& plan) {
  return static_cast<int64_t>(plan.prompts.size()) *
         static_cast<int64_t>(std::max<size_t>(1, plan.chains.size())) *
         static_cast<int64_t>(plan.targets.size());
}

int64_t PlannedConversations(const BenchmarkPlan& plan) {
  return static_cast<int64_t>(plan.scenario_count) * 4 * plan.trials_per_scenario *
         static_cast<int64_t>(plan.targets.size());
}

void RunSweep(const SweepPlan& plan, RunContext& ctx, RunResult& result) {
  const size_t n_chains = std::max<size_t>(1, plan.chains.size());
  const size_t n_targets = plan.targets.size();
  const size_t n = static_cast<size_t>(PlannedConversations(plan));
  OrderedCommitter committer(n, ctx, result);

  auto job = [&](size_t idx) {
    const size_t i = idx / (n_chains * n_targets);
    const size_t j = (idx / n_targets) % n_chains;
    const size_t k = idx % n_targets;
    const std::string& target_id = plan.targets[k];

    ItemResult item;
    Conversation& conv = item.conversation;
    conv.id = NewId();
    conv.target_id = target_id;
    conv.labels = {{"plan_index", std::to_string(idx)},
                   {"prompt_index", std::to_string(i)},
                   {"chain_index", std::to_string(j)},
                   {"target_index", std::to_string(k)}};
    std::string chain_id;
    if (!plan.chains.empty()) {
      chain_id = plan.chains[j].id;
      conv.labels["chain_id"] = chain_id;
    }

    std::string error;
    std::string content;
    try {
      content = plan.chains.empty() ? plan.prompts[i] : ApplyChain(plan.chains[j], plan.prompts[i]);
      if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument, "converted prompt is empty");
      }
    } catch (const std::exception& e) {
      error = e.what();
      if (content.empty()) content = plan.prompts[i];
    }
    PromptRequest req = NewRequest(conv, content);
    req.metadata = {{"source_prompt_index", std::to_string(i)}};
    if (!chain_id.empty()) req.metadata["converter_chain_id"] = chain_id;

    PromptResponse resp =
        error.empty() ? SendOrError(ctx, target_id, conv, req, &error) : ErrorResponse(req, error);
    conv.turns.push_back({req, resp});
    if (!error.empty()) {
      item.errored = true;
      conv.labels[kErrorLabel] = error;
      Log(ctx, LogLevel::kError, "sweep item failed",
          {{"target_id", target_id}, {"plan_index", std::to_string(idx)}, {"error", error}});
    } else {
      ApplyResponseScorers(ctx, plan.scorers, conv, resp, item.scores);
    }
    committer.Complete(idx, std::move(item));
  };

  RunPool(n, ctx.max_concurrency, *ctx.progress, job);
  committer.Drain();
}

AdaptiveOutcome RunAdaptive(const AdaptiveObjective& objective, RunContext& ctx,
                            RunResult& result) {
  if (objective.max_turns <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_turns must be a positive integer");
  }
  if (objective.attacker == objective.defender) {
    throw Error(ErrorCode::kInvalidArgument, "attacker and defender must differ");
  }
  const ScorerSpec& success = LookupScorer(ctx, objective.success_scorer);

  AdaptiveOutcome outcome;
  Conversation& defender_conv = outcome.conversation;
  defender_conv.id = NewId();
  defender_conv.target_id = objective.defender;
  defender_conv.labels = {{"orchestrator", "adaptive"}, {"attacker", objective.attacker}};

  Conversation attacker_conv;
  attacker_conv.id = NewId();
  attacker_conv.target_id = objective.attacker;
  attacker_conv.labels = {{kAuxiliaryLabel, "true"},
                          {"role", "attacker"},
                          {"defender_conversation_id", defender_conv.id}};

  std::vector<ScoreRecord> scores;
  int consecutive_empty = 0;
  std::string failure;

  for (int turn = 1; turn <= objective.max_turns; ++turn) {
    if (ctx.progress->cancel.load()) break;
    const StringMap bindings = {{"goal", objective.goal},
                                {"turn", std::to_string(turn)},
                                {"max_turns", std::to_string(objective.max_turns)},
                                {"transcript", TranscriptText(defender_conv)}};
    PromptRequest attack_req = NewRequest(attacker_conv, RenderTemplate(kAttackerPreamble, bindings));
    attack_req.metadata = {{"turn", std::to_string(turn)}};
    std::string error;
    PromptResponse attack_resp =
        SendOrError(ctx, objective.attacker, attacker_conv, attack_req, &error);
    attacker_conv.turns.push_back({attack_req, attack_resp});
    if (!error.empty()) {
      Log(ctx, LogLevel::kError, "attacker call failed",
          {{"turn", std::to_string(turn)}, {"error", error}});
      continue;
    }

    const std::string& raw = attack_resp.content;
    const size_t b = raw.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
      if (++consecutive_empty >= 2) {
        failure = "attacker produced an empty prompt twice in a row";
        break;
      }
      Log(ctx, LogLevel::kWarn, "attacker produced an empty prompt",
          {{"turn", std::to_string(turn)}});
      continue;
    }
    consecutive_empty = 0;
    const size_t e = raw.find_last_not_of(" \t\r\n");

    PromptRequest def_req = NewRequest(defender_conv, raw.substr(b, e - b + 1));
    def_req.metadata = {{"author", "attacker"},
                        {"turn", std::to_string(turn)},
                        {"attacker_request_id", attack_req.id}};
    ++outcome.defender_calls;
    PromptResponse def_resp =
        SendOrError(ctx, objective.defender, defender_conv, def_req, &error);
    def_resp.request_id = def_req.id;
    defender_conv.turns.push_back({def_req, def_resp});
    if (!error.empty()) {
      Log(ctx, LogLevel::kError, "defender call failed",
          {{"turn", std::to_string(turn)}, {"error", error}});
      continue;
    }
    ScoreRecord verdict = ApplyBooleanScorer(success, def_resp);
    verdict.conversation_id = defender_conv.id;
    verdict.target_id = objective.defender;
    verdict.trial = turn;
    const bool hit = std::get<bool>(verdict.value);
    scores.push_back(std::move(verdict));
    if (hit) {
      outcome.success = true;
      outcome.turn = turn;
      break;
    }
  }

  defender_conv.labels["outcome"] = outcome.success ? "success" : "exhausted";
  if (outcome.success) defender_conv.labels["success_turn"] = std::to_string(outcome.turn);
  if (!failure.empty()) defender_conv.labels[kErrorLabel] = failure;

  ctx.handle->AppendConversation(attacker_conv);
  ctx.handle->AppendConversation(defender_conv);
  for (const auto& s : scores) ctx.handle->AppendScore(s);
  ctx.progress->done.fetch_add(1);
  if (!failure.empty()) ctx.progress->errors.fetch_add(1);
  result.conversations.push_back(attacker_conv);
  result.conversations.push_back(defender_conv);
  result.scores.insert(result.scores.end(), scores.begin(), scores.end());
  result.adaptive = outcome;

  Log(ctx, LogLevel::kInfo, "adaptive run finished",
      {{"outcome", defender_conv.labels["outcome"]},
       {"defender_calls", std::to_string(outcome.defender_calls)}});
  if (!failure.empty()) throw Error(ErrorCode::kDegenerateAttacker, failure);
  return outcome;
}

std::map<std::string, MetricReport> ReportsFromRecords(const std::vector<ScoreRecord>& scores,
                                                       const std::vector<ScorerSpec>& scorers) {
  std::string mcq_id;
  for (const auto& s : scorers) {
    if (s.kind == ScorerKind::kMcq) {
      mcq_id = s.id;
      break;
    }
  }
  std::map<std::string, std::vector<ScoreRecord>> by_target;
  for (const auto& r : scores) {
    if (r.scorer_id == mcq_id && r.correct && r.category) by_target[r.target_id].push_back(r);
  }
  std::map<std::string, MetricReport> reports;
  for (const auto& [target, records] : by_target) {
    reports[target] = BuildMetricReport(target, records, GroupTrials(records));
  }
  return reports;
}

std::map<std::string, MetricReport> RunBenchmark(const BenchmarkPlan& plan, RunContext& ctx,
                                                 RunResult& result) {
  const ConstructLibrary library = LoadConstructLibrary(
      plan.library_ref.empty() ? DefaultLibraryPath() : std::filesystem::path(plan.library_ref));

  std::unique_ptr<Target> paraphrase;
  if (!plan.paraphrase_target.empty()) {
    paraphrase = ctx.make_target(LookupTarget(ctx, plan.paraphrase_target));
  }
  ScenarioOptions options;
  options.constructs_per_profile = plan.constructs_per_profile;
  result.scenarios = GenerateScenarios(plan.seed, plan.scenario_count, library, options,
                                       paraphrase.get(), ctx.log);
  for (const auto& s : result.scenarios) ctx.handle->AppendScenario(s);

  struct Question {
    const Scenario* scenario;
    size_t item_index;
    std::string prompt;
  };
  std::vector<Question> questions;
  StringMap key_book;
  for (const auto& s : result.scenarios) {
    for (size_t q = 0; q < s.battery.size(); ++q) {
      std::string prompt = EmitMcqPrompt(s.battery[q], s.vignette);
      key_book[McqFingerprint(prompt)] = s.battery[q].key;
      questions.push_back({&s, q, std::move(prompt)});
    }
  }
  // Mock targets answer from the key book; real targets never see it.
  for (const auto& id : plan.targets) {
    auto it = ctx.targets.find(id);
    if (it != ctx.targets.end() && it->second.kind == TargetKind::kMock) {
      for (const auto& [fp, key] : key_book) it->second.profile.answer_keys[fp] = key;
    }
  }

  std::string mcq_scorer;
  std::vector<std::string> other_scorers;
  for (const auto& s : ctx.scorers) {
    if (s.kind == ScorerKind::kMcq) {
      if (mcq_scorer.empty()) mcq_scorer = s.id;
    } else {
      other_scorers.push_back(s.id);
    }
  }

  const size_t trials = static_cast<size_t>(std::max(1, plan.trials_per_scenario));
  const size_t per_target = questions.size() * trials;
  const size_t n = per_target * plan.targets.size();
  OrderedCommitter committer(n, ctx, result);

  auto job = [&](size_t idx) {
    const size_t t = idx / per_target;
    const size_t q = (idx % per_target) / trials;
    const size_t trial = idx % trials;
    const Question& question = questions[q];
    const McqItem& item = question.scenario->battery[question.item_index];
    const std::string& target_id = plan.targets[t];

    ItemResult out;
    Conversation& conv = out.conversation;
    conv.id = NewId();
    conv.target_id = target_id;
    conv.labels = {{"plan_index", std::to_string(idx)},
                   {"scenario_id", question.scenario->id},
                   {"item_index", std::to_string(question.item_index)},
                   {"category", std::string(ToString(item.category))},
                   {"trial", std::to_string(trial)}};
    PromptRequest req = NewRequest(conv, question.prompt);
    req.metadata = {{"scenario_id", question.scenario->id},
                    {"item_index", std::to_string(question.item_index)}};
    std::string error;
    PromptResponse resp = SendOrError(ctx, target_id, conv, req, &error);
    conv.turns.push_back({req, resp});

    std::optional<std::string> extracted;
    if (error.empty()) {
      extracted = ExtractMcqAnswer(resp.content, item.choices);
    } else {
      out.errored = true;
      conv.labels[kErrorLabel] = error;
      Log(ctx, LogLevel::kError, "benchmark item failed; scored incorrect",
          {{"target_id", target_id}, {"plan_index", std::to_string(idx)}, {"error", error}});
    }
    ScoreRecord record = ScoreMcq(extracted, item, resp);
    record.scorer_id = mcq_scorer;
    record.conversation_id = conv.id;
    record.target_id = target_id;
    record.scenario_id = question.scenario->id;
    record.item_index = static_cast<int>(question.item_index);
    record.trial = static_cast<int>(trial);
    out.scores.push_back(std::move(record));
    if (error.empty()) ApplyResponseScorers(ctx, other_scorers, conv, resp, out.scores);
    committer.Complete(idx, std::move(out));
  };

  RunPool(n, ctx.max_concurrency, *ctx.progress, job);
  committer.Drain();

  result.reports = ReportsFromRecords(result.scores, ctx.scorers);
  for (const auto& [target, report] : result.reports) {
    Json j = report;
    Log(ctx, LogLevel::kInfo, "metric report", {{"target_id", target}, {"report", j.dump()}});
  }
  return result.reports;
}

// ---------------------------------------------------------------------------
// Engine

struct Engine::ActiveRun {
  CampaignConfig config;
  RunContext ctx;
  RunProgress progress;
  std::shared_ptr<LogSink> log;
  std::atomic<RunStatus> status{RunStatus::kPending};
  std::optional<Timestamp> started_at;
  std::optional<Timestamp> ended_at;
  RunResult result;
  std::mutex mu;
  std::condition_variable cv;
  bool finished = false;
  std::thread thread;

  RunRecord Snapshot() {
    RunRecord r;
    r.run_id = ctx.run_id;
    r.campaign_id = config.id;
    r.status = status.load();
    {
      std::lock_guard lock(mu);
      r.started_at = started_at;
      r.ended_at = ended_at;
    }
    r.counters.conversations_total = progress.total.load();
    r.counters.conversations_done = progress.done.load();
    r.counters.errors = progress.errors.load();
    return r;
  }
};

Engine::Engine(EngineOptions options)
    : options_(std::move(options)), store_(options_.store_root), log_(options_.log) {
  if (!log_) log_ = std::make_shared<NullLogSink>();
  if (!options_.target_factory) options_.target_factory = MakeTarget;
}

Engine::~Engine() {
  std::vector<std::shared_ptr<ActiveRun>> runs;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, run] : runs_) runs.push_back(run);
  }
  for (auto& run : runs) {
    run->progress.cancel.store(true);
    if (run->thread.joinable()) run->thread.join();
  }
}

ValidationResult Engine::Validate(const CampaignConfig& config) const {
  std::lock_guard lock(mu_);
  return ValidateCampaign(config, options_.registry);
}

void Engine::RegisterTarget(TargetSpec spec) {
  std::lock_guard lock(mu_);
  options_.registry.Add(std::move(spec));
}

std::vector<TargetSpec> Engine::Targets() const {
  std::lock_guard lock(mu_);
  std::vector<TargetSpec> out;
  for (const auto& [id, spec] : options_.registry.targets) out.push_back(spec);
  return out;
}

std::shared_ptr<Engine::ActiveRun> Engine::Prepare(const CampaignConfig& input, bool detached) {
  ValidationResult v = Validate(input);
  if (!v.ok()) {
    std::string joined;
    for (const auto& e : v.errors) joined += (joined.empty() ? "" : "; ") + e;
    throw Error(ErrorCode::kInvalidArgument, "invalid campaign: " + joined);
  }
  auto run = std::make_shared<ActiveRun>();
  run->config = std::move(*v.config);
  const CampaignConfig& config = run->config;

  {
    std::lock_guard lock(mu_);
    run->ctx.targets = options_.registry.targets;
  }
  for (const auto& t : config.targets) run->ctx.targets[t.id] = t;
  run->ctx.scorers = config.scorers;
  run->ctx.make_target = options_.target_factory;
  run->ctx.max_concurrency = config.max_concurrency;
  run->ctx.progress = &run->progress;

  int64_t total = 1;
  if (std::holds_alternative<SweepParams>(config.orchestrator)) {
    SweepPlan plan{config.dataset.prompts, config.converter_chains, config.target_ids, {}};
    total = PlannedConversations(plan);
  } else if (const auto* b = std::get_if<BenchmarkParams>(&config.orchestrator)) {
    BenchmarkPlan plan;
    plan.scenario_count = b->scenario_count;
    plan.trials_per_scenario = b->trials_per_scenario;
    plan.targets = config.target_ids;
    total = PlannedConversations(plan);
  }
  run->progress.total.store(total);

  run->ctx.handle = store_.OpenRun(config, std::nullopt, total);
  run->ctx.run_id = run->ctx.handle->run_id();
  run->log = std::make_shared<TeeLogSink>(
      std::vector<std::shared_ptr<LogSink>>{run->ctx.handle->events(), log_});
  run->ctx.log = run->log.get();
  run->result.record = run->Snapshot();

  {
    std::lock_guard lock(mu_);
    runs_[run->ctx.run_id] = run;
  }
  if (detached) {
    run->thread = std::thread([this, run] { Execute(*run); });
  }
  return run;
}

void Engine::Execute(ActiveRun& run) {
  RunContext& ctx = run.ctx;
  const CampaignConfig& config = run.config;
  {
    std::lock_guard lock(run.mu);
    run.started_at = NowUtc();
  }
  run.status.store(RunStatus::kRunning);
  std::string error;
  try {
    ctx.handle->WriteStatus(run.Snapshot());
    Log(ctx, LogLevel::kInfo, "run started",
        {{"campaign_id", config.id},
         {"orchestrator", std::string(OrchestratorKindName(config.orchestrator))}});
    if (std::holds_alternative<SweepParams>(config.orchestrator)) {
      SweepPlan plan{config.dataset.prompts, config.converter_chains, config.target_ids,
                     AllScorerIds(ctx)};
      RunSweep(plan, ctx, run.result);
    } else if (const auto* a = std::get_if<AdaptiveParams>(&config.orchestrator)) {
      AdaptiveObjective objective{a->goal, a->attacker, a->defender, a->success_scorer,
                                  a->max_turns};
      RunAdaptive(objective, ctx, run.result);
    } else {
      const auto& b = std::get<BenchmarkParams>(config.orchestrator);
      BenchmarkPlan plan;
      plan.scenario_count = b.scenario_count;
      plan.trials_per_scenario = b.trials_per_scenario;
      plan.targets = config.target_ids;
      plan.seed = config.seed;
      plan.library_ref = b.library_ref;
      plan.constructs_per_profile = b.constructs_per_profile;
      plan.paraphrase_target = b.paraphrase_target;
      RunBenchmark(plan, ctx, run.result);
    }
  } catch (const std::exception& e) {
    error = e.what();
    Log(ctx, LogLevel::kError, "run failed", {{"error", error}});
  }

  RunStatus final_status = RunStatus::kCompleted;
  if (!error.empty()) {
    final_status = RunStatus::kFailed;
  } else if (run.progress.done.load() < run.progress.total.load()) {
    final_status = run.progress.cancel.load() ? RunStatus::kCancelled : RunStatus::kFailed;
  }
  {
    std::lock_guard lock(run.mu);
    run.ended_at = NowUtc();
  }
  run.status.store(final_status);
  RunRecord record = run.Snapshot();
  Log(ctx, LogLevel::kInfo, "run finished", {{"status", std::string(ToString(final_status))}});
  try {
    ctx.handle->WriteStatus(record);
  } catch (const std::exception& e) {
    if (error.empty()) error = e.what();
  }
  log_->Flush();
  {
    std::lock_guard lock(run.mu);
    run.result.record = record;
    run.result.error = error;
    run.finished = true;
  }
  run.cv.notify_all();
}

RunResult Engine::Run(const CampaignConfig& config) {
  auto run = Prepare(config, /*detached=*/false);
  Execute(*run);
  std::lock_guard lock(run->mu);
  return run->result;
}

std::string Engine::Start(const CampaignConfig& config) {
  return Prepare(config, /*detached=*/true)->ctx.run_id;
}

RunRecord Engine::Status(const std::string& run_id) const {
  std::shared_ptr<ActiveRun> run;
  {
    std::lock_guard lock(mu_);
    auto it = runs_.find(run_id);
    if (it != runs_.end()) run = it->second;
  }
  if (run) return run->Snapshot();
  return store_.LoadRun(run_id).record;
}

RunRecord Engine::Cancel(const std::string& run_id) {
  std::shared_ptr<ActiveRun> run;
  {
    std::lock_guard lock(mu_);
    auto it = runs_.find(run_id);
    if (it != runs_.end()) run = it->second;
  }
  if (!run) {
    if (!store_.Exists(run_id)) throw Error(ErrorCode::kNotFound, "run " + run_id + " not found");
    throw Error(ErrorCode::kInvalidState, "run " + run_id + " is not active");
  }
  if (IsTerminal(run->status.load())) {
    throw Error(ErrorCode::kInvalidState, "run " + run_id + " is already " +
                                              std::string(ToString(run->status.load())));
  }
  run->progress.cancel.store(true);
  Log(run->ctx, LogLevel::kInfo, "cancellation requested");
  std::unique_lock lock(run->mu);
  run->cv.wait(lock, [&] { return run->finished; });
  return run->result.record;
}

RunResult Engine::Wait(const std::string& run_id) {
  std::shared_ptr<ActiveRun> run;
  {
    std::lock_guard lock(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) throw Error(ErrorCode::kNotFound, "run " + run_id + " not active");
    run = it->second;
  }
  std::unique_lock lock(run->mu);
  run->cv.wait(lock, [&] { return run->finished; });
  return run->result;
}

}  // namespace redforge
