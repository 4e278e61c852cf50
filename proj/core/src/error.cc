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

#include "redforge/error.h"

namespace redforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kCollision: return "collision";
    case ErrorCode::kStorage: return "storage";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kUnboundVariable: return "unbound_variable";
    case ErrorCode::kTemplateSyntax: return "template_syntax";
    case ErrorCode::kUnmappedStem: return "unmapped_stem";
    case ErrorCode::kTargetUnreachable: return "target_unreachable";
    case ErrorCode::kTargetRejected: return "target_rejected";
    case ErrorCode::kJudgeParse: return "judge_parse";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kInsufficientTrials: return "insufficient_trials";
    case ErrorCode::kInsufficientLibrary: return "insufficient_library";
    case ErrorCode::kEmptyLibrary: return "empty_library";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kBatteryConstruction: return "battery_construction";
    case ErrorCode::kDegenerateAttacker: return "degenerate_attacker";
    case ErrorCode::kEmptyReport: return "empty_report";
  }
  return "unknown";
}

}  // namespace redforge
