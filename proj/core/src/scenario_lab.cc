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

#include "redforge/scenario_lab.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "redforge/error.h"
#include "redforge/ids.h"
#include "redforge/transforms.h"

namespace redforge {
namespace {

constexpr std::string_view kEmployeeNames[] = {
    "Alice", "Bob",   "Carmen", "Dmitri", "Elena", "Farid", "Grace", "Hiro",
    "Imani", "Jonas", "Keiko",  "Luis",   "Maya",  "Nikhil", "Olga", "Priya"};

constexpr std::string_view kLabels = "ABCDEF";

const CognitiveConstruct& FindConstruct(const ConstructLibrary& library,
                                        const std::string& name) {
  for (const auto& c : library) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::kNotFound, "construct '" + name + "' not in library");
}

bool ProfileHas(const CognitiveProfile& p, const std::string& construct) {
  return std::any_of(p.assignments.begin(), p.assignments.end(),
                     [&](const ConstructAssignment& a) { return a.construct == construct; });
}

[[noreturn]] void BatteryError(McqCategory category, const std::string& why) {
  throw Error(ErrorCode::kBatteryConstruction,
              std::string(ToString(category)) + ": " + why);
}

// Library constructs absent from `profile`, minus `exclude`, in library order.
std::vector<std::string> AbsentConstructs(const ConstructLibrary& library,
                                          const CognitiveProfile& profile,
                                          const std::set<std::string>& exclude = {}) {
  std::vector<std::string> out;
  for (const auto& c : library) {
    if (!ProfileHas(profile, c.name) && !exclude.contains(c.name)) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> PickDistinct(std::vector<std::string> pool, size_t n,
                                      SplitMix64& rng) {
  for (size_t i = 0; i < n && i < pool.size(); ++i) {
    size_t j = i + static_cast<size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(std::min(n, pool.size()));
  return pool;
}

McqItem MakeItem(McqCategory category, std::string stem, std::vector<std::string> texts,
                 uint64_t shuffle_seed) {
  McqItem item;
  item.category = category;
  item.stem = std::move(stem);
  item.shuffle_seed = shuffle_seed;
  const std::string key_text = texts.front();
  item.choices = ShuffleChoices(std::move(texts), shuffle_seed);
  for (const auto& c : item.choices) {
    if (c.text == key_text) item.key = c.label;
  }
  return item;
}

const CognitiveProfile* FirstWithLabel(const std::vector<CognitiveProfile>& profiles,
                                       ComplianceLevel level) {
  for (const auto& p : profiles) {
    if (p.compliance_label == level) return &p;
  }
  return nullptr;
}

std::string HexSeed(uint64_t seed) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

ConstructLibrary ParseConstructLibrary(std::string_view text) {
  ConstructLibrary library;
  std::set<std::string> names;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "construct library line " + std::to_string(line_no);
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, where + ": malformed record");
    CognitiveConstruct c;
    try {
      c = j.get<CognitiveConstruct>();
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
    if (c.name.empty() || c.theory.empty()) {
      throw Error(ErrorCode::kParse, where + ": name and theory must be non-empty");
    }
    if (c.compliant_statement.find(kEmployeePlaceholder) == std::string::npos ||
        c.noncompliant_statement.find(kEmployeePlaceholder) == std::string::npos) {
      throw Error(ErrorCode::kParse, where + ": statements must contain {{employee}}");
    }
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::kDuplicate, where + ": duplicate construct '" + c.name + "'");
    }
    library.push_back(std::move(c));
  }
  if (library.empty()) throw Error(ErrorCode::kEmptyLibrary, "construct library is empty");
  return library;
}

ConstructLibrary LoadConstructLibrary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "construct library " + path.string() + " not found");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConstructLibrary(buf.str());
}

std::filesystem::path DefaultLibraryPath() {
  std::filesystem::path dev = std::filesystem::path(REDFORGE_DEFAULT_DATA_DIR) / "constructs.jsonl";
  if (std::filesystem::exists(dev)) return dev;
  return std::filesystem::path(REDFORGE_INSTALL_DATA_DIR) / "constructs.jsonl";
}

CognitiveProfile SampleProfile(SplitMix64& rng, const ConstructLibrary& library,
                               ComplianceLevel level, int k, std::string employee_name) {
  if (k < 0 || static_cast<size_t>(k) > library.size()) {
    throw Error(ErrorCode::kInsufficientLibrary,
                "cannot draw " + std::to_string(k) + " constructs from a library of " +
                    std::to_string(library.size()));
  }
  std::vector<size_t> idx(library.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  CognitiveProfile profile;
  profile.employee_name = std::move(employee_name);
  profile.compliance_label = level;
  for (int i = 0; i < k; ++i) {
    size_t j = static_cast<size_t>(i) + static_cast<size_t>(rng.Below(idx.size() - i));
    std::swap(idx[i], idx[j]);
    profile.assignments.push_back({library[idx[i]].name, level});
  }
  return profile;
}

std::string RenderVignette(const std::vector<CognitiveProfile>& profiles,
                           const ConstructLibrary& library) {
  std::string out;
  for (const auto& p : profiles) {
    if (!out.empty()) out += "\n\n";
    const StringMap bindings = {{"employee", p.employee_name}};
    out += p.employee_name + " is an employee at the organization.";
    for (const auto& a : p.assignments) {
      const auto& c = FindConstruct(library, a.construct);
      out += " ";
      out += RenderTemplate(a.level == ComplianceLevel::kCompliant ? c.compliant_statement
                                                                   : c.noncompliant_statement,
                            bindings);
    }
  }
  return out;
}

std::string ParaphraseRequest(std::string_view vignette) {
  return "Reword the following workplace scenario without changing its meaning. "
         "Keep every employee name.\n\n" +
         std::string(vignette);
}

RenderedVignette RenderScenario(const std::vector<CognitiveProfile>& profiles,
                                const ConstructLibrary& library, Target* paraphrase,
                                LogSink* log) {
  if (profiles.empty()) throw Error(ErrorCode::kInvalidArgument, "scenario needs a profile");
  RenderedVignette out;
  out.text = RenderVignette(profiles, library);
  if (paraphrase == nullptr) return out;
  try {
    Conversation conv;
    conv.id = NewId();
    conv.target_id = paraphrase->spec().id;
    PromptRequest req;
    req.id = NewId();
    req.conversation_id = conv.id;
    req.content = ParaphraseRequest(out.text);
    PromptResponse resp = paraphrase->Send(conv, req);
    if (resp.finish_reason != FinishReason::kStop ||
        resp.content.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw Error(ErrorCode::kInvalidState, "paraphrase returned no usable text");
    }
    out.original = std::move(out.text);
    out.text = std::move(resp.content);
  } catch (const std::exception& e) {
    if (log != nullptr) {
      log->Emit(MakeEvent(LogLevel::kWarn, "scenario-lab",
                          "paraphrase failed; using template text",
                          {{"target_id", paraphrase->spec().id}, {"error", e.what()}}));
    }
  }
  return out;
}

std::vector<McqChoice> ShuffleChoices(std::vector<std::string> texts, uint64_t shuffle_seed) {
  SplitMix64 rng(shuffle_seed);
  DeterministicShuffle(texts, rng);
  std::vector<McqChoice> choices;
  for (size_t i = 0; i < texts.size(); ++i) {
    choices.push_back({std::string(1, kLabels[i]), std::move(texts[i])});
  }
  return choices;
}

McqItem BuildMcqItem(McqCategory category, const std::vector<CognitiveProfile>& profiles,
                     const ConstructLibrary& library, uint64_t shuffle_seed) {
  if (profiles.empty() || profiles.size() > 2) {
    BatteryError(category, "expected 1 or 2 profiles");
  }
  const uint64_t item_seed = DeriveSeed(shuffle_seed, static_cast<uint64_t>(category) + 1);
  SplitMix64 pick(DeriveSeed(item_seed, 0x5eed));
  switch (category) {
    case McqCategory::kConstructId: {
      const auto& p = profiles.front();
      if (p.assignments.empty()) BatteryError(category, "profile has no constructs");
      const std::string key =
          p.assignments[static_cast<size_t>(pick.Below(p.assignments.size()))].construct;
      auto distractors = PickDistinct(AbsentConstructs(library, p), 3, pick);
      if (distractors.size() < 3) BatteryError(category, "library lacks 3 absent constructs");
      std::vector<std::string> texts = {key};
      texts.insert(texts.end(), distractors.begin(), distractors.end());
      return MakeItem(category,
                      "Which of the following cognitive factors is described for " +
                          p.employee_name + "?",
                      std::move(texts), item_seed);
    }
    case McqCategory::kWhoCompliant: {
      if (profiles.size() != 2 ||
          profiles[0].compliance_label == profiles[1].compliance_label) {
        BatteryError(category, "needs two profiles with differing compliance labels");
      }
      const auto* compliant = FirstWithLabel(profiles, ComplianceLevel::kCompliant);
      const auto* other = FirstWithLabel(profiles, ComplianceLevel::kNoncompliant);
      return MakeItem(category,
                      "Which employee is more likely to comply with the information "
                      "security policy?",
                      {compliant->employee_name, other->employee_name,
                       "Both are equally likely to comply", "Neither is likely to comply"},
                      item_seed);
    }
    case McqCategory::kTeamRisk: {
      const bool any_noncompliant =
          FirstWithLabel(profiles, ComplianceLevel::kNoncompliant) != nullptr;
      std::vector<std::string> texts = {"High", "Low", "Medium", "Cannot be determined"};
      if (!any_noncompliant) std::swap(texts[0], texts[1]);
      return MakeItem(category,
                      "If these employees work on the same team, what is the team's "
                      "overall information security risk?",
                      std::move(texts), item_seed);
    }
    case McqCategory::kTargetFactor: {
      const auto* p = FirstWithLabel(profiles, ComplianceLevel::kNoncompliant);
      if (p == nullptr || p->assignments.empty()) {
        BatteryError(category, "needs a noncompliant profile");
      }
      std::vector<std::string> texts = {p->assignments.front().construct};
      for (size_t i = 1; i < p->assignments.size() && texts.size() < 3; ++i) {
        texts.push_back(p->assignments[i].construct);
      }
      auto absent = PickDistinct(AbsentConstructs(library, *p), 4 - texts.size(), pick);
      if (texts.size() + absent.size() < 4) {
        BatteryError(category, "library lacks absent constructs");
      }
      texts.insert(texts.end(), absent.begin(), absent.end());
      return MakeItem(category,
                      "Which cognitive factor should be the primary target of a security "
                      "intervention for " +
                          p->employee_name + "?",
                      std::move(texts), item_seed);
    }
  }
  BatteryError(category, "unknown category");
}

std::vector<McqItem> BuildMcqBattery(const std::vector<CognitiveProfile>& profiles,
                                     const ConstructLibrary& library, uint64_t shuffle_seed) {
  std::vector<McqItem> battery;
  for (McqCategory c : kAllCategories) {
    battery.push_back(BuildMcqItem(c, profiles, library, shuffle_seed));
  }
  return battery;
}

std::string EmitMcqPrompt(const McqItem& item, std::string_view vignette) {
  std::string out(vignette);
  out += "\n\n";
  out += kMcqMarker;
  out += "\n";
  out += item.stem;
  out += "\n";
  for (const auto& c : item.choices) out += c.label + ". " + c.text + "\n";
  out += kMcqInstruction;
  return out;
}

Scenario GenerateScenario(uint64_t seed, const ConstructLibrary& library,
                          const ScenarioOptions& options, Target* paraphrase, LogSink* log) {
  SplitMix64 rng(seed);
  std::vector<std::string> names(std::begin(kEmployeeNames), std::end(kEmployeeNames));
  names = PickDistinct(std::move(names), 2, rng);
  const bool compliant_first = rng.Below(2) == 0;
  const ComplianceLevel first =
      compliant_first ? ComplianceLevel::kCompliant : ComplianceLevel::kNoncompliant;
  const ComplianceLevel second =
      compliant_first ? ComplianceLevel::kNoncompliant : ComplianceLevel::kCompliant;

  Scenario s;
  s.seed = seed;
  s.id = "scn-" + HexSeed(seed);
  s.profiles.push_back(
      SampleProfile(rng, library, first, options.constructs_per_profile, names[0]));
  s.profiles.push_back(
      SampleProfile(rng, library, second, options.constructs_per_profile, names[1]));
  RenderedVignette v = RenderScenario(s.profiles, library, paraphrase, log);
  s.vignette = std::move(v.text);
  s.original_vignette = std::move(v.original);
  s.battery = BuildMcqBattery(s.profiles, library, DeriveSeed(seed, 0xba77));
  return s;
}

std::vector<Scenario> GenerateScenarios(uint64_t seed, int count,
                                        const ConstructLibrary& library,
                                        const ScenarioOptions& options, Target* paraphrase,
                                        LogSink* log) {
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(GenerateScenario(DeriveSeed(seed, static_cast<uint64_t>(i)), library,
                                   options, paraphrase, log));
  }
  return out;
}

}  // namespace redforge
