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

#include "redforge/validate.h"

#include <fstream>
#include <set>

#include "redforge/error.h"
#include "redforge/transforms.h"

namespace redforge {
namespace {

bool IsBlank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

bool IsValidUrl(const std::string& url) {
  std::string rest;
  if (url.rfind("http://", 0) == 0) {
    rest = url.substr(7);
  } else if (url.rfind("https://", 0) == 0) {
    rest = url.substr(8);
  } else {
    return false;
  }
  std::string authority = rest.substr(0, rest.find('/'));
  if (authority.empty()) return false;
  for (char c : authority) {
    if (c == ' ' || c == '\t' || c == '@') return false;
  }
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    std::string port = authority.substr(colon + 1);
    if (port.empty() || port.size() > 5) return false;
    for (char c : port) {
      if (c < '0' || c > '9') return false;
    }
    if (colon == 0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> ReadPromptFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "dataset file " + path + " unreadable");
  std::vector<std::string> prompts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!IsBlank(line)) prompts.push_back(line);
  }
  return prompts;
}

std::vector<std::string> TargetSpecViolations(const TargetSpec& spec) {
  std::vector<std::string> out;
  const std::string who = "target " + spec.id + ": ";
  if (spec.id.empty()) out.push_back("target id must be non-empty");
  if (spec.kind == TargetKind::kHttpChat && !IsValidUrl(spec.endpoint_url)) {
    out.push_back(who + "endpoint_url '" + spec.endpoint_url + "' is not a valid URL");
  }
  if (spec.temperature < 0) out.push_back(who + "temperature must be >= 0");
  if (spec.max_tokens <= 0) out.push_back(who + "max_tokens must be positive");
  if (spec.timeout_ms <= 0) out.push_back(who + "timeout_ms must be positive");
  if (spec.retry.max_attempts <= 0) out.push_back(who + "retry.max_attempts must be positive");
  if (spec.retry.base_backoff_ms <= 0) out.push_back(who + "retry.base_backoff_ms must be positive");
  if (spec.kind == TargetKind::kMock) {
    if (spec.profile.verbosity_correct < 0 || spec.profile.verbosity_incorrect < 0) {
      out.push_back(who + "verbosity_tokens must be non-negative");
    }
    for (const auto& k : spec.profile.refusal_keywords) {
      for (char c : k) {
        if (c >= 'A' && c <= 'Z') {
          out.push_back(who + "refusal keyword '" + k + "' must be lowercase");
          break;
        }
      }
    }
  }
  return out;
}

const TargetSpec* ResolveTarget(const CampaignConfig& config,
                                const TargetRegistry& registry,
                                const std::string& id) {
  for (const auto& t : config.targets) {
    if (t.id == id) return &t;
  }
  auto it = registry.targets.find(id);
  return it == registry.targets.end() ? nullptr : &it->second;
}

ValidationResult ValidateCampaign(const CampaignConfig& input,
                                  const TargetRegistry& registry) {
  ValidationResult result;
  auto& errors = result.errors;
  CampaignConfig config = input;

  if (config.id.empty()) errors.push_back("campaign id must be non-empty");

  std::set<std::string> defined;
  for (const auto& t : config.targets) {
    if (!defined.insert(t.id).second) errors.push_back("target " + t.id + " defined twice");
    for (auto& e : TargetSpecViolations(t)) errors.push_back(std::move(e));
  }

  auto check_target = [&](const std::string& id) {
    const TargetSpec* spec = ResolveTarget(config, registry, id);
    if (spec == nullptr) {
      errors.push_back("target " + id + " not registered");
    } else if (!defined.contains(id)) {
      for (auto& e : TargetSpecViolations(*spec)) errors.push_back(std::move(e));
    }
    return spec != nullptr;
  };

  if (config.target_ids.empty()) errors.push_back("target_ids must be non-empty");
  std::set<std::string> seen_targets;
  for (const auto& id : config.target_ids) {
    if (!seen_targets.insert(id).second) {
      errors.push_back("target " + id + " listed twice");
      continue;
    }
    check_target(id);
  }

  if (config.max_concurrency <= 0) errors.push_back("max_concurrency must be positive");

  for (size_t i = 0; i < config.converter_chains.size(); ++i) {
    const auto& chain = config.converter_chains[i];
    for (size_t s = 0; s < chain.steps.size(); ++s) {
      for (const auto& e : ConverterSpecViolations(chain.steps[s])) {
        errors.push_back("converter chain " + std::to_string(i) + " step " +
                         std::to_string(s) + ": " + e);
      }
    }
  }

  if (config.scorers.empty()) errors.push_back("scorer_specs must be non-empty");
  std::map<std::string, ScorerKind> scorer_kinds;
  bool has_mcq = false;
  for (const auto& s : config.scorers) {
    if (s.id.empty()) errors.push_back("scorer id must be non-empty");
    if (!scorer_kinds.emplace(s.id, s.kind).second) {
      errors.push_back("scorer " + s.id + " defined twice");
    }
    if (s.kind == ScorerKind::kKeyword && s.keywords.empty()) {
      errors.push_back("scorer " + s.id + ": keyword list must be non-empty");
    }
    if (s.kind == ScorerKind::kLlmJudge) {
      if (s.judge_target.empty()) {
        errors.push_back("scorer " + s.id + ": judge_target required");
      } else {
        check_target(s.judge_target);
      }
      if (IsBlank(s.rubric)) errors.push_back("scorer " + s.id + ": rubric required");
    }
    if (s.kind == ScorerKind::kMcq) has_mcq = true;
  }

  if (const auto* adaptive = std::get_if<AdaptiveParams>(&config.orchestrator)) {
    if (adaptive->max_turns <= 0) errors.push_back("max_turns must be a positive integer");
    if (IsBlank(adaptive->goal)) errors.push_back("adaptive goal must be non-empty");
    if (adaptive->attacker.empty()) {
      errors.push_back("adaptive attacker required");
    } else {
      check_target(adaptive->attacker);
    }
    if (adaptive->defender.empty()) {
      errors.push_back("adaptive defender required");
    } else {
      check_target(adaptive->defender);
    }
    if (!adaptive->attacker.empty() && adaptive->attacker == adaptive->defender) {
      errors.push_back("attacker and defender must differ");
    }
    auto it = scorer_kinds.find(adaptive->success_scorer);
    if (it == scorer_kinds.end()) {
      errors.push_back("success scorer " + adaptive->success_scorer + " not defined");
    } else if (it->second != ScorerKind::kKeyword && it->second != ScorerKind::kRefusal) {
      errors.push_back("success scorer " + adaptive->success_scorer + " must be boolean");
    }
  } else if (const auto* bench = std::get_if<BenchmarkParams>(&config.orchestrator)) {
    if (bench->scenario_count <= 0) errors.push_back("scenario_count must be positive");
    if (bench->trials_per_scenario < 1) errors.push_back("trials_per_scenario must be >= 1");
    if (bench->constructs_per_profile < 2 || bench->constructs_per_profile > 5) {
      errors.push_back("constructs_per_profile must be within 2..5");
    }
    if (!has_mcq) errors.push_back("benchmark requires an mcq scorer");
    if (!bench->paraphrase_target.empty()) check_target(bench->paraphrase_target);
  } else {
    if (config.dataset.prompts.empty() && !config.dataset.path.empty()) {
      try {
        config.dataset.prompts = ReadPromptFile(config.dataset.path);
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
    }
    if (config.dataset.prompts.empty()) {
      errors.push_back("dataset must contain at least one prompt");
    }
    for (size_t i = 0; i < config.dataset.prompts.size(); ++i) {
      if (IsBlank(config.dataset.prompts[i])) {
        errors.push_back("dataset prompt " + std::to_string(i) + " is blank");
      }
    }
    for (const auto& s : config.scorers) {
      if (s.kind == ScorerKind::kMcq) {
        errors.push_back("scorer " + s.id + " of kind mcq requires a benchmark orchestrator");
      }
    }
  }

  if (errors.empty()) result.config = std::move(config);
  return result;
}

}  // namespace redforge
