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

#include <benchmark/benchmark.h>
#include <stdlib.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "redforge/run_store.h"
#include "redforge/scenario_lab.h"
#include "redforge/scoring.h"
#include "redforge/transforms.h"

namespace redforge {
namespace {

std::string Text(size_t n) {
  std::mt19937_64 rng(n);
  std::string s(n, ' ');
  for (char& c : s) c = static_cast<char>(' ' + rng() % 95);
  return s;
}

void BM_Converter(benchmark::State& state, ConverterKind kind) {
  const std::string input = Text(static_cast<size_t>(state.range(0)));
  const ConverterSpec spec{kind, {}};
  for (auto _ : state) benchmark::DoNotOptimize(ApplyConverter(spec, input));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK_CAPTURE(BM_Converter, rot13, ConverterKind::kRot13)->Range(64, 64 << 10);
BENCHMARK_CAPTURE(BM_Converter, base64, ConverterKind::kBase64)->Range(64, 64 << 10);
BENCHMARK_CAPTURE(BM_Converter, leetspeak, ConverterKind::kLeetspeak)->Range(64, 64 << 10);

void BM_ChainOfThree(benchmark::State& state) {
  const std::string input = Text(1024);
  const ConverterChain chain{"c",
                             {{ConverterKind::kLeetspeak, {}},
                              {ConverterKind::kRot13, {}},
                              {ConverterKind::kBase64, {}}}};
  for (auto _ : state) benchmark::DoNotOptimize(ApplyChain(chain, input));
}
BENCHMARK(BM_ChainOfThree);

const std::vector<McqChoice> kChoices = {
    {"A", "Self-efficacy"}, {"B", "Perceived severity"}, {"C", "Response cost"}, {"D", "Habit"}};

void BM_ExtractAnswerLine(benchmark::State& state) {
  const std::string reply = Text(400) + "\nAnswer: C\n";
  for (auto _ : state) benchmark::DoNotOptimize(ExtractMcqAnswer(reply, kChoices));
}
BENCHMARK(BM_ExtractAnswerLine);

void BM_ExtractChoiceText(benchmark::State& state) {
  const std::string reply =
      "Weighing the options, the strongest factor here is clearly perceived severity.";
  for (auto _ : state) benchmark::DoNotOptimize(ExtractMcqAnswer(reply, kChoices));
}
BENCHMARK(BM_ExtractChoiceText);

std::vector<ScoreRecord> McqRecords(size_t n) {
  std::mt19937_64 rng(7);
  std::vector<ScoreRecord> out(n);
  for (size_t i = 0; i < n; ++i) {
    ScoreRecord& r = out[i];
    r.scorer_id = "mcq";
    r.target_id = "t";
    r.correct = rng() % 4 == 0;
    r.value = *r.correct;
    r.category = kAllCategories[i % 4];
    r.completion_tokens = static_cast<int64_t>(rng() % 200);
    r.answer = std::string(1, static_cast<char>('A' + rng() % 4));
    r.scenario_id = "s" + std::to_string(i / 12);
    r.item_index = static_cast<int>(i % 4);
    r.trial = static_cast<int>((i / 4) % 3);
  }
  return out;
}

void BM_BuildMetricReport(benchmark::State& state) {
  const auto records = McqRecords(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildMetricReport("t", records, GroupTrials(records)));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_BuildMetricReport)->Arg(120)->Arg(1200)->Arg(12000)->Arg(120000);

void BM_GenerateScenario(benchmark::State& state) {
  const ConstructLibrary library = LoadConstructLibrary(DefaultLibraryPath());
  uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(GenerateScenario(seed++, library));
}
BENCHMARK(BM_GenerateScenario);

void BM_StoreAppendScore(benchmark::State& state) {
  std::string tmpl = (std::filesystem::temp_directory_path() / "redforge-bench-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) {
    state.SkipWithError("mkdtemp failed");
    return;
  }
  {
    RunStore store(tmpl);
    CampaignConfig campaign;
    campaign.id = "bench";
    campaign.target_ids = {"t"};
    campaign.dataset.prompts = {"p"};
    auto handle = store.OpenRun(campaign, "run", 0);
    ScoreRecord record = McqRecords(1).front();
    int64_t n = 0;
    for (auto _ : state) {
      record.id = "r" + std::to_string(n++);
      handle->AppendScore(record);
    }
    state.SetItemsProcessed(n);
  }
  std::filesystem::remove_all(tmpl);
}
BENCHMARK(BM_StoreAppendScore);

}  // namespace
}  // namespace redforge

BENCHMARK_MAIN();
