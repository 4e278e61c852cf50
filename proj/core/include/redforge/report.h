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


// Leaderboards and run summaries shared by the CLI and the gateway.

#ifndef REDFORGE_REPORT_H_
#define REDFORGE_REPORT_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "redforge/model.h"
#include "redforge/run_store.h"

namespace redforge {

enum class ReportFormat { kStructured, kTable };

std::string_view ToString(ReportFormat format);
// Accepts "structured" (or "json") and "table".
ReportFormat ParseReportFormat(std::string_view text);

struct ReportDocument {
  ReportFormat format = ReportFormat::kStructured;
  // Accuracy descending, then wastefulness ascending, then target_id.
  std::vector<MetricReport> rows;
  std::vector<std::string> caveats;
};

// Plain-text table with two-space gutters. Columns whose cells are all
// numeric are right-aligned; the first row is the header.
std::string FormatTextTable(const std::vector<std::vector<std::string>>& rows);

std::vector<MetricReport> SortReportRows(const std::map<std::string, MetricReport>& reports);

// Caveats that apply to any set of metric reports.
std::vector<std::string> MetricCaveats(const std::map<std::string, MetricReport>& reports);

// Throws Error(kEmptyReport) for an empty map.
ReportDocument BuildReportDocument(const std::map<std::string, MetricReport>& reports,
                                   ReportFormat format);

std::string RenderReportDocument(const ReportDocument& doc);

// BuildReportDocument + RenderReportDocument.
std::string RenderReport(const std::map<std::string, MetricReport>& reports,
                         ReportFormat format);

// Inverse of the structured rendering.
ReportDocument ParseStructuredReport(std::string_view text);

// Report for a stored run: the leaderboard for benchmarks, a per-target
// scorer summary for sweeps, the attack outcome for adaptive runs.
struct RunReport {
  std::string run_id;
  std::string kind;
  RunStatus status = RunStatus::kPending;
  std::map<std::string, MetricReport> metrics;
  Json summary;
  std::vector<std::string> caveats;
};

RunReport BuildRunReport(const LoadedRun& run);

Json RunReportToJson(const RunReport& report);

std::string RenderRunReport(const RunReport& report, ReportFormat format);

}  // namespace redforge

#endif  // REDFORGE_REPORT_H_
