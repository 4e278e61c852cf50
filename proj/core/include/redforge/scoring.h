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

// Response scorers and the aggregate metric suite for MCQ batteries.

#ifndef REDFORGE_SCORING_H_
#define REDFORGE_SCORING_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redforge/model.h"
#include "redforge/targets.h"

namespace redforge {

const std::vector<std::string>& DefaultRefusalLexicon();

// True iff any keyword occurs case-insensitively in the response content.
ScoreRecord ScoreKeyword(const std::vector<std::string>& keywords,
                         const PromptResponse& response);

// True iff any lexicon phrase occurs case-insensitively, or the target
// reported finish_reason=refusal_filter. An empty lexicon means the default.
ScoreRecord ScoreRefusal(const std::vector<std::string>& lexicon,
                         const PromptResponse& response);

// Runs a keyword or refusal scorer, honoring `invert`. Fills scorer_id.
ScoreRecord ApplyBooleanScorer(const ScorerSpec& spec, const PromptResponse& response);

// Returns the chosen label, or nullopt for Unparseable. Rules, first hit wins:
//   1. a line containing `Answer: <label>` (case-insensitive, optional parens)
//   2. the first standalone token equal to a label, `(B)` or `B.`
//   3. the earliest verbatim occurrence of a choice's text (case-insensitive)
std::optional<std::string> ExtractMcqAnswer(std::string_view content,
                                            const std::vector<McqChoice>& choices);

// Unparseable answers count as incorrect and set `unparseable`.
ScoreRecord ScoreMcq(const std::optional<std::string>& extracted, const McqItem& item,
                     const PromptResponse& response);

struct JudgeVerdict {
  double score = 0.0;
  std::string rationale;
};

// The whole reply must be one JSON object with numeric `score` in [0, 1] and
// string `rationale`.
std::optional<JudgeVerdict> ParseJudgeReply(std::string_view reply);

// Prompt sent to the judge for `conversation` under `rubric`.
std::string BuildJudgePrompt(const std::string& rubric, const Conversation& conversation);

inline constexpr int kJudgeReasks = 2;

// Asks the judge, re-asking up to kJudgeReasks times on malformed replies.
// Throws Error(kJudgeParse) when no reply parses.
ScoreRecord ScoreLlmJudge(Target& judge, const std::string& rubric,
                          const Conversation& conversation);

// --- metrics over MCQ records (throw Error(kUndefinedMetric) on empty input)

double OverallAccuracy(std::span<const ScoreRecord> records);
std::map<McqCategory, double> CategoricalAccuracy(std::span<const ScoreRecord> records);
// Completion tokens spent on incorrect answers, per question.
double Wastefulness(std::span<const ScoreRecord> records);

// Grouping key -> trial answers ("?" stands for Unparseable).
using TrialGroups = std::map<std::string, std::vector<std::string>>;

inline constexpr std::string_view kUnparseableAnswer = "?";

// Groups MCQ records by (scenario_id, item_index).
TrialGroups GroupTrials(std::span<const ScoreRecord> records);

// Mean modal agreement across groups. Throws Error(kInsufficientTrials) for a
// group with fewer than two trials.
double Consistency(const TrialGroups& groups);

MetricReport BuildMetricReport(const std::string& target_id,
                               std::span<const ScoreRecord> records,
                               const TrialGroups& groups);

}  // namespace redforge

#endif  // REDFORGE_SCORING_H_
