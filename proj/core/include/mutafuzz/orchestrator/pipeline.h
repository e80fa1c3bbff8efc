// Copyright 2026 The mutafuzz Authors
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

#ifndef MUTAFUZZ_ORCHESTRATOR_PIPELINE_H_
#define MUTAFUZZ_ORCHESTRATOR_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/buildctl/buildctl.h"
#include "mutafuzz/cfront/source_unit.h"
#include "mutafuzz/covtrace/covtrace.h"
#include "mutafuzz/mutgen/mutant.h"
#include "mutafuzz/orchestrator/config.h"
#include "mutafuzz/orchestrator/score.h"

namespace mutafuzz::orchestrator {

enum class Stage { kParse, kCoverage, kMutate, kBuild, kTce, kSample, kPrioritize, kFuzz, kReport };

std::string_view StageName(Stage stage);
std::optional<Stage> ParseStage(std::string_view name);
const std::vector<Stage>& AllStages();

struct MutantRecord {
  std::string id;
  std::string file;
  std::string function;
  std::string op;
  std::size_t statement = 0;
  std::string status;
  std::string note;
  std::string unit_test;  // workspace-relative path, empty unless killed by fuzzing
};

struct FsciSummary {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double alpha = 0.05;
  double width = 0.10;
  std::string stopped_by;
  std::size_t examined = 0;
  std::size_t kills = 0;
  std::vector<std::string> trace;
};

struct Report {
  // Over the mutants that were not sampled out.
  MutationScore score;
  std::map<std::string, std::size_t> counts;  // every status name, zeros included
  std::size_t total_mutants = 0;
  double statement_coverage = 0.0;
  std::size_t executed_mutants = 0;  // run against the existing tests
  std::optional<FsciSummary> fsci;
  std::vector<MutantRecord> mutants;
};

std::string FormatReportJson(const Report& report);
Report ParseReportJson(std::string_view text);
std::string FormatSummary(const Report& report);

struct PipelineOptions {
  // Restrict fuzzing to these ids, on top of fuzz.kill_list.
  std::optional<std::set<std::string>> fuzz_only;
  std::optional<double> fuzz_budget_s;
  std::function<void(const std::string&)> progress;
};

// Runs the analysis in stages. Each stage persists its results under
// <workspace>/.mutafuzz and is skipped when a later call finds it done, so
// an interrupted run resumes where it stopped.
class Pipeline {
 public:
  explicit Pipeline(Config config, PipelineOptions options = {});
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  // Runs every stage up to and including `last` that is not yet done.
  void RunThrough(Stage last);
  Report Run();

  bool Done(Stage stage) const;
  std::filesystem::path StateDir() const;

  const Config& config() const { return config_; }
  const std::vector<mutgen::Mutant>& mutants() const { return mutants_; }
  const covtrace::CoverageMatrix& matrix() const { return matrix_; }
  const cfront::SourceUnit& unit(const std::string& file) const;

 private:
  struct Execution {
    mutgen::MutantStatus status = mutgen::MutantStatus::kLive;
    std::size_t tests_run = 0;
    std::string killing_test;
    std::vector<std::string> ordered_tests;
    std::string note;
  };
  struct FuzzOutcome {
    mutgen::MutantStatus status = mutgen::MutantStatus::kLive;
    std::string note;
    std::string unit_test;
  };
  void RunStage(Stage stage);
  void MarkDone(Stage stage);
  void Log(const std::string& message) const;

  void ParseSources();
  void CollectCoverage();
  void GenerateMutants();
  void BuildMutants();
  void PartitionMutants();
  void SampleMutants();
  void PrioritizeMutants();
  void FuzzMutants();
  Report WriteReport();

  void LoadState();
  void SaveManifest();
  void SaveExecutions();
  mutgen::Mutant& Find(const std::string& id);
  const Execution& Execute(const mutgen::Mutant& mutant);
  buildctl::Workspace& CoverageBuild();
  covtrace::CollectOptions CoverageRunOptions() const;
  FuzzOutcome Fuzz(const mutgen::Mutant& mutant);
  std::string EmitUnitTest(const mutgen::Mutant& mutant, const std::string& killing_input,
                           const std::filesystem::path& dir);
  std::set<std::string> FuzzTargets() const;

  Config config_;
  PipelineOptions options_;
  std::set<Stage> done_;
  std::map<std::string, cfront::SourceUnit> units_;
  std::vector<covtrace::TestCase> tests_;
  covtrace::CoverageLayout layout_;
  covtrace::CoverageMatrix matrix_;
  std::map<std::string, bool> original_passed_;
  double statement_coverage_ = 0.0;
  std::vector<mutgen::Mutant> mutants_;
  std::map<std::string, Execution> executions_;
  std::map<std::string, std::string> unit_tests_;
  std::optional<FsciSummary> fsci_;
  std::unique_ptr<buildctl::Workspace> coverage_workspace_;
};

}  // namespace mutafuzz::orchestrator

#endif  // MUTAFUZZ_ORCHESTRATOR_PIPELINE_H_
