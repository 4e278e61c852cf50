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


#include "redforge/report.h"

#include <algorithm>
#include <cstdio>

#include "redforge/error.h"
#include "redforge/orchestration.h"

namespace redforge {
namespace {

std::string Fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

}  // namespace

std::string FormatTextTable(const std::vector<std::vector<std::string>>& rows) {
  auto numeric = [](const std::string& cell) {
    return cell == "-" || (!cell.empty() && cell.find_first_not_of("0123456789.-") == std::string::npos);
  };
  std::vector<size_t> widths;
  std::vector<bool> right;
  for (size_t r = 0; r < rows.size(); ++r) {
    widths.resize(std::max(widths.size(), rows[r].size()), 0);
    right.resize(widths.size(), true);
    for (size_t c = 0; c < rows[r].size(); ++c) {
      widths[c] = std::max(widths[c], rows[r][c].size());
      if (r > 0 && !numeric(rows[r][c])) right[c] = false;
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      const std::string pad(widths[c] - row[c].size(), ' ');
      line += right[c] ? pad + row[c] : row[c] + pad;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

namespace {

std::string RenderCaveats(const std::vector<std::string>& caveats) {
  if (caveats.empty()) return {};
  std::string out = "\nCaveats:\n";
  for (const auto& c : caveats) out += "- " + c + "\n";
  return out;
}

std::string MetricTable(const std::vector<MetricReport>& rows) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"target_id", "questions", "accuracy"};
  for (McqCategory c : kAllCategories) header.emplace_back(ToString(c));
  for (const char* h : {"wastefulness", "tokens/incorrect", "consistency", "unparseable"}) {
    header.emplace_back(h);
  }
  cells.push_back(std::move(header));
  for (const auto& r : rows) {
    std::vector<std::string> row = {r.target_id, std::to_string(r.n_questions),
                                    Fixed(r.overall_accuracy, 4)};
    for (McqCategory c : kAllCategories) {
      auto it = r.categorical_accuracy.find(c);
      row.push_back(it == r.categorical_accuracy.end() ? "-" : Fixed(it->second, 4));
    }
    row.push_back(Fixed(r.wastefulness, 1));
    row.push_back(r.tokens_per_incorrect ? Fixed(*r.tokens_per_incorrect, 1) : "-");
    row.push_back(r.consistency ? Fixed(*r.consistency, 4) : "-");
    row.push_back(std::to_string(r.unparseable_count));
    cells.push_back(std::move(row));
  }
  return FormatTextTable(cells);
}

double ScoreAsNumber(const ScoreValue& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  if (const double* d = std::get_if<double>(&v)) return *d;
  return 0.0;
}

bool IsAuxiliary(const Conversation& c) {
  auto it = c.labels.find(kAuxiliaryLabel);
  return it != c.labels.end() && it->second == "true";
}

Json SweepSummary(const LoadedRun& run, std::vector<std::string>& caveats) {
  struct Tally {
    int64_t conversations = 0;
    int64_t errors = 0;
    std::map<std::string, std::pair<int64_t, double>> scorers;  // id -> (count, sum)
  };
  std::map<std::string, Tally> tallies;
  int64_t errors = 0;
  for (const auto& c : run.conversations) {
    if (IsAuxiliary(c)) continue;
    Tally& t = tallies[c.target_id];
    ++t.conversations;
    if (c.labels.count(kErrorLabel)) {
      ++t.errors;
      ++errors;
    }
  }
  for (const auto& s : run.scores) {
    auto& [count, sum] = tallies[s.target_id].scorers[s.scorer_id];
    ++count;
    sum += ScoreAsNumber(s.value);
  }
  Json targets = Json::object();
  for (const auto& [id, t] : tallies) {
    Json scorers = Json::object();
    for (const auto& [sid, cs] : t.scorers) {
      scorers[sid] = Json{{"scored", cs.first},
                          {"mean", cs.first == 0 ? 0.0 : cs.second / static_cast<double>(cs.first)}};
    }
    targets[id] = Json{{"conversations", t.conversations}, {"errors", t.errors}, {"scorers", scorers}};
  }
  if (errors > 0) {
    caveats.push_back(std::to_string(errors) + " conversation(s) failed and carry no scores");
  }
  return Json{{"targets", targets}};
}

Json AdaptiveSummary(const LoadedRun& run) {
  const auto* params = std::get_if<AdaptiveParams>(&run.campaign.orchestrator);
  Json out{{"outcome", "not started"}, {"defender_calls", 0}};
  if (params) {
    out["attacker"] = params->attacker;
    out["defender"] = params->defender;
    out["max_turns"] = params->max_turns;
  }
  for (const auto& c : run.conversations) {
    if (IsAuxiliary(c)) continue;
    auto label = [&](const char* key) {
      auto it = c.labels.find(key);
      return it == c.labels.end() ? std::string() : it->second;
    };
    out["outcome"] = label("outcome");
    out["defender_calls"] = c.turns.size();
    const std::string turn = label("success_turn");
    out["success_turn"] = turn.empty() ? Json(nullptr) : Json(std::stoi(turn));
    if (!label(kErrorLabel).empty()) out["error"] = label(kErrorLabel);
  }
  return out;
}

}  // namespace

std::string_view ToString(ReportFormat format) {
  return format == ReportFormat::kTable ? "table" : "structured";
}

ReportFormat ParseReportFormat(std::string_view text) {
  if (text == "structured" || text == "json") return ReportFormat::kStructured;
  if (text == "table") return ReportFormat::kTable;
  throw Error(ErrorCode::kParse, "unknown report format: " + std::string(text));
}

std::vector<MetricReport> SortReportRows(const std::map<std::string, MetricReport>& reports) {
  std::vector<MetricReport> rows;
  rows.reserve(reports.size());
  for (const auto& [id, r] : reports) rows.push_back(r);
  std::sort(rows.begin(), rows.end(), [](const MetricReport& a, const MetricReport& b) {
    if (a.overall_accuracy != b.overall_accuracy) return a.overall_accuracy > b.overall_accuracy;
    if (a.wastefulness != b.wastefulness) return a.wastefulness < b.wastefulness;
    return a.target_id < b.target_id;
  });
  return rows;
}

std::vector<std::string> MetricCaveats(const std::map<std::string, MetricReport>& reports) {
  std::vector<std::string> caveats = {
      "wastefulness counts completion tokens per question; targets that omit usage counts are "
      "measured by whitespace tokenization",
      "TeamRisk keys rate a team High when any member is noncompliant",
  };
  bool any_consistency = false;
  int64_t unparseable = 0;
  for (const auto& [id, r] : reports) {
    any_consistency = any_consistency || r.consistency.has_value();
    unparseable += r.unparseable_count;
  }
  if (any_consistency) {
    caveats.push_back("consistency is the mean modal agreement across repeated trials");
  } else {
    caveats.push_back("consistency omitted: fewer than two trials per question");
  }
  if (unparseable > 0) {
    caveats.push_back(std::to_string(unparseable) +
                      " answer(s) could not be parsed and were scored incorrect");
  }
  return caveats;
}

ReportDocument BuildReportDocument(const std::map<std::string, MetricReport>& reports,
                                   ReportFormat format) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyReport, "no metric reports to render");
  return ReportDocument{format, SortReportRows(reports), MetricCaveats(reports)};
}

std::string RenderReportDocument(const ReportDocument& doc) {
  if (doc.format == ReportFormat::kStructured) {
    Json j{{"format", "structured"}, {"rows", doc.rows}, {"caveats", doc.caveats}};
    return j.dump(2) + "\n";
  }
  return MetricTable(doc.rows) + RenderCaveats(doc.caveats);
}

std::string RenderReport(const std::map<std::string, MetricReport>& reports,
                         ReportFormat format) {
  return RenderReportDocument(BuildReportDocument(reports, format));
}

ReportDocument ParseStructuredReport(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report: ") + e.what());
  }
  ReportDocument doc;
  doc.rows = j.at("rows").get<std::vector<MetricReport>>();
  doc.caveats = j.value("caveats", std::vector<std::string>{});
  return doc;
}

RunReport BuildRunReport(const LoadedRun& run) {
  RunReport report;
  report.run_id = run.record.run_id;
  report.status = run.record.status;
  report.kind = std::string(OrchestratorKindName(run.campaign.orchestrator));
  if (report.kind == "benchmark") {
    report.metrics = ReportsFromRecords(run.scores, run.campaign.scorers);
    if (report.metrics.empty()) {
      throw Error(ErrorCode::kEmptyReport, "run " + run.record.run_id + " has no scored questions");
    }
    report.caveats = MetricCaveats(report.metrics);
  } else if (report.kind == "sweep") {
    report.summary = SweepSummary(run, report.caveats);
  } else {
    report.summary = AdaptiveSummary(run);
  }
  if (!IsTerminal(run.record.status)) {
    report.caveats.push_back("run is still " + std::string(ToString(run.record.status)) +
                             "; figures are partial");
  } else if (run.record.status != RunStatus::kCompleted) {
    report.caveats.push_back("run ended " + std::string(ToString(run.record.status)) +
                             "; figures cover completed items only");
  }
  return report;
}

Json RunReportToJson(const RunReport& report) {
  Json j{{"format", "structured"},
         {"run_id", report.run_id},
         {"kind", report.kind},
         {"status", ToString(report.status)}};
  if (report.kind == "benchmark") {
    j["rows"] = SortReportRows(report.metrics);
  } else {
    j["summary"] = report.summary;
  }
  j["caveats"] = report.caveats;
  return j;
}

std::string RenderRunReport(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::kStructured) return RunReportToJson(report).dump(2) + "\n";

  std::string out = "run " + report.run_id + " (" + report.kind + ", " +
                    std::string(ToString(report.status)) + ")\n\n";
  if (report.kind == "benchmark") {
    out += MetricTable(SortReportRows(report.metrics));
  } else if (report.kind == "sweep") {
    std::vector<std::vector<std::string>> cells = {
        {"target_id", "conversations", "errors", "scorer", "scored", "mean"}};
    for (const auto& [tid, t] : report.summary.at("targets").items()) {
      const Json& scorers = t.at("scorers");
      if (scorers.empty()) {
        cells.push_back({tid, std::to_string(t.at("conversations").get<int64_t>()),
                         std::to_string(t.at("errors").get<int64_t>()), "-", "0", "-"});
      }
      for (const auto& [sid, s] : scorers.items()) {
        cells.push_back({tid, std::to_string(t.at("conversations").get<int64_t>()),
                         std::to_string(t.at("errors").get<int64_t>()), sid,
                         std::to_string(s.at("scored").get<int64_t>()),
                         Fixed(s.at("mean").get<double>(), 4)});
      }
    }
    out += FormatTextTable(cells);
  } else {
    const Json& s = report.summary;
    std::vector<std::vector<std::string>> cells = {{"field", "value"}};
    for (const auto& [key, value] : s.items()) {
      cells.push_back({key, value.is_string() ? value.get<std::string>() : value.dump()});
    }
    out += FormatTextTable(cells);
  }
  return out + RenderCaveats(report.caveats);
}

}  // namespace redforge
