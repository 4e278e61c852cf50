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

#ifndef REDFORGE_VALIDATE_H_
#define REDFORGE_VALIDATE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "redforge/model.h"

namespace redforge {

// Targets known outside any single campaign document (for example, those
// registered with the gateway).
struct TargetRegistry {
  std::map<std::string, TargetSpec> targets;

  void Add(TargetSpec spec) { targets[spec.id] = std::move(spec); }
};

struct ValidationResult {
  // Present only when `errors` is empty. Dataset files are materialized into
  // `dataset.prompts`.
  std::optional<CampaignConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Collects every violation rather than stopping at the first.
ValidationResult ValidateCampaign(const CampaignConfig& config,
                                  const TargetRegistry& registry);

std::vector<std::string> TargetSpecViolations(const TargetSpec& spec);

// Resolves an id against the campaign's own targets first, then the registry.
const TargetSpec* ResolveTarget(const CampaignConfig& config,
                                const TargetRegistry& registry,
                                const std::string& id);

// Loads a prompt file: one prompt per line, blank lines skipped.
std::vector<std::string> ReadPromptFile(const std::string& path);

}  // namespace redforge

#endif  // REDFORGE_VALIDATE_H_
