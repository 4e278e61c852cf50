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

// Behavioral-compliance scenario generation: construct library loading,
// profile sampling, vignette rendering and the four-category MCQ battery.

#ifndef REDFORGE_SCENARIO_LAB_H_
#define REDFORGE_SCENARIO_LAB_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redforge/log.h"
#include "redforge/model.h"
#include "redforge/rng.h"
#include "redforge/targets.h"

namespace redforge {

using ConstructLibrary = std::vector<CognitiveConstruct>;

inline constexpr std::string_view kEmployeePlaceholder = "{{employee}}";
inline constexpr std::string_view kMcqInstruction =
    "Answer with the letter of the correct choice.";

// One JSON record per line: name, theory, compliant_statement,
// noncompliant_statement. Blank lines are skipped.
ConstructLibrary ParseConstructLibrary(std::string_view text);
ConstructLibrary LoadConstructLibrary(const std::filesystem::path& path);

// Shipped seed library (source tree during development, install prefix after
// `cmake --install`).
std::filesystem::path DefaultLibraryPath();

// Draws k distinct constructs without replacement, all at `level`.
CognitiveProfile SampleProfile(SplitMix64& rng, const ConstructLibrary& library,
                               ComplianceLevel level, int k, std::string employee_name);

// Intro sentence per employee followed by each bound statement; paragraphs
// separated by a blank line.
std::string RenderVignette(const std::vector<CognitiveProfile>& profiles,
                           const ConstructLibrary& library);

struct RenderedVignette {
  std::string text;
  // Set when a paraphrase replaced the template text.
  std::optional<std::string> original;
};

// With a paraphrase target, the template text is sent for rewording. Any
// failure falls back to the template and emits a WARN event.
RenderedVignette RenderScenario(const std::vector<CognitiveProfile>& profiles,
                                const ConstructLibrary& library, Target* paraphrase,
                                LogSink* log);

std::string ParaphraseRequest(std::string_view vignette);

// Builds one item. Throws Error(kBatteryConstruction) naming the category
// when the profiles cannot support it.
McqItem BuildMcqItem(McqCategory category, const std::vector<CognitiveProfile>& profiles,
                     const ConstructLibrary& library, uint64_t shuffle_seed);

// ConstructID, WhoCompliant, TeamRisk, TargetFactor, in that order.
std::vector<McqItem> BuildMcqBattery(const std::vector<CognitiveProfile>& profiles,
                                     const ConstructLibrary& library, uint64_t shuffle_seed);

// Texts in canonical order (key first) shuffled by `shuffle_seed`.
std::vector<McqChoice> ShuffleChoices(std::vector<std::string> texts, uint64_t shuffle_seed);

std::string EmitMcqPrompt(const McqItem& item, std::string_view vignette);

struct ScenarioOptions {
  int constructs_per_profile = 3;
};

// One compliant and one noncompliant employee, everything derived from seed.
Scenario GenerateScenario(uint64_t seed, const ConstructLibrary& library,
                          const ScenarioOptions& options = {}, Target* paraphrase = nullptr,
                          LogSink* log = nullptr);

// Scenario i uses DeriveSeed(seed, i).
std::vector<Scenario> GenerateScenarios(uint64_t seed, int count,
                                        const ConstructLibrary& library,
                                        const ScenarioOptions& options = {},
                                        Target* paraphrase = nullptr, LogSink* log = nullptr);

}  // namespace redforge

#endif  // REDFORGE_SCENARIO_LAB_H_
