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

#include "mutafuzz/orchestrator/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/common/runtime_sources.h"
#include "mutafuzz/common/subprocess.h"
#include "mutafuzz/fuzzdrv/fuzzdrv.h"
#include "mutafuzz/fuzzer/fuzzer.h"
#include "mutafuzz/mutgen/mutgen.h"
#include "mutafuzz/prioritizer/prioritizer.h"
#include "mutafuzz/sampler/sampler.h"

namespace mutafuzz::orchestrator {

namespace fs = std::filesystem;
using mutgen::Mutant;
using mutgen::MutantStatus;

namespace {

constexpr std::string_view kStateDirName = ".mutafuzz";
constexpr std::string_view kCoverageDirName = "covbuild";

// Regression tests include the subject through this macro so the same file
// can be rebuilt against the mutant with -DMUTAFUZZ_SUBJECT="\"mutant.c\"".
constexpr std::string_view kUnitTestPrelude =
    "#ifndef MUTAFUZZ_SUBJECT\n"
    "#define MUTAFUZZ_SUBJECT \"original.c\"\n"
    "#endif\n"
    "#define main mutafuzz_subject_main\n"
    "#include MUTAFUZZ_SUBJECT\n"
    "#undef main\n";

const std::vector<std::pair<Stage, std::string_view>> kStageNames = {
    {Stage::kParse, "parse"},           {Stage::kCoverage, "coverage"},
    {Stage::kMutate, "mutate"},         {Stage::kBuild, "build"},
    {Stage::kTce, "tce"},               {Stage::kSample, "sample"},
    {Stage::kPrioritize, "prioritize"}, {Stage::kFuzz, "fuzz"},
    {Stage::kReport, "report"},
};

const std::vector<MutantStatus> kAllStatuses = {
    MutantStatus::kGenerated,     MutantStatus::kCompileFailed,    MutantStatus::kTceEquivalent,
    MutantStatus::kTceRedundant,  MutantStatus::kSampledOut,       MutantStatus::kLikelyEquivalent,
    MutantStatus::kKilledDiff,    MutantStatus::kKilledCrash,      MutantStatus::kLive,
};

std::string FormatReal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double ParseReal(const std::string& text) { return std::strtod(text.c_str(), nullptr); }

std::string FirstLine(std::string_view text) {
  std::string line(text.substr(0, text.find('\n')));
  return Trim(line);
}

std::string Join(const std::vector<std::string>& items, char separator) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += separator;
    out += items[i];
  }
  return out;
}

// "key value" lines; the value is the rest of the line.
std::map<std::string, std::vector<std::string>> ReadKeyValues(const fs::path& path) {
  std::map<std::string, std::vector<std::string>> out;
  for (const std::string& line : SplitLines(ReadFile(path))) {
    if (line.empty()) continue;
    const std::size_t space = line.find(' ');
    const std::string key = line.substr(0, space);
    out[key].push_back(space == std::string::npos ? "" : line.substr(space + 1));
  }
  return out;
}

std::string Value(const std::map<std::string, std::vector<std::string>>& kv,
                  const std::string& key) {
  auto it = kv.find(key);
  return it == kv.end() || it->second.empty() ? "" : it->second.front();
}

void CopyWorkspace(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  for (const fs::directory_entry& entry : fs::directory_iterator(from)) {
    const std::string name = entry.path().filename().string();
    if (name == kStateDirName || name == ".git") continue;
    fs::copy(entry.path(), to / name,
             fs::copy_options::recursive | fs::copy_options::copy_symlinks);
  }
}

std::uint64_t MixSeed(std::uint64_t seed, std::string_view id) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : id) hash = (hash ^ c) * 1099511628211ull;
  return seed ^ hash;
}

ProcessResult Compile(const std::vector<std::string>& argv, const fs::path& cwd) {
  ProcessResult result = RunProcess({argv, cwd, {}, std::chrono::seconds(120), true});
  if (!result.Succeeded()) {
    throw Error(ErrorCode::kIoError,
                "compiling " + argv.back() + " failed: " + FirstLine(result.output));
  }
  return result;
}

}  // namespace

std::string_view StageName(Stage stage) {
  for (const auto& [value, name] : kStageNames) {
    if (value == stage) return name;
  }
  return "?";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (const auto& [value, text] : kStageNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

const std::vector<Stage>& AllStages() {
  static const std::vector<Stage> stages = [] {
    std::vector<Stage> out;
    for (const auto& entry : kStageNames) out.push_back(entry.first);
    return out;
  }();
  return stages;
}

Pipeline::Pipeline(Config config, PipelineOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  fs::create_directories(StateDir());
  buildctl::Workspace::RecoverBackups(config_.workspace);
  if (fs::exists(StateDir() / kCoverageDirName)) {
    buildctl::Workspace::RecoverBackups(StateDir() / kCoverageDirName);
  }
  for (std::size_t k = 0; k < config_.sources.size(); ++k) {
    const std::string& source = config_.sources[k];
    cfront::SourceUnit unit = cfront::Parse(ReadFile(config_.workspace / source), source);
    layout_.files.push_back(source);
    layout_.statements.push_back(unit.statements.size());
    units_.emplace(source, std::move(unit));
  }
  tests_ = covtrace::ParseTestList(ReadFile(config_.tests));
  if (tests_.empty()) throw Error(ErrorCode::kBadValue, "tests");
  LoadState();
}

Pipeline::~Pipeline() = default;

fs::path Pipeline::StateDir() const { return config_.workspace / kStateDirName; }

bool Pipeline::Done(Stage stage) const { return done_.count(stage) > 0; }

const cfront::SourceUnit& Pipeline::unit(const std::string& file) const {
  auto it = units_.find(file);
  if (it == units_.end()) throw Error(ErrorCode::kBadValue, "not a mutated source: " + file);
  return it->second;
}

void Pipeline::Log(const std::string& message) const {
  static std::mutex mutex;
  if (!options_.progress) return;
  std::lock_guard<std::mutex> lock(mutex);
  options_.progress(message);
}

void Pipeline::MarkDone(Stage stage) {
  done_.insert(stage);
  std::string text;
  for (Stage s : AllStages()) {
    if (done_.count(s)) text += std::string(StageName(s)) + "\n";
  }
  WriteFileAtomic(StateDir() / "stages.txt", text);
}

void Pipeline::RunThrough(Stage last) {
  for (Stage stage : AllStages()) {
    // Fuzzing a subset leaves the stage open for the remaining mutants.
    const bool forced = stage == Stage::kFuzz && options_.fuzz_only.has_value();
    if (!Done(stage) || forced || stage == Stage::kReport) RunStage(stage);
    if (stage == last) break;
  }
}

Report Pipeline::Run() {
  RunThrough(Stage::kFuzz);
  Report report = WriteReport();
  MarkDone(Stage::kReport);
  return report;
}

void Pipeline::RunStage(Stage stage) {
  Log("stage " + std::string(StageName(stage)));
  switch (stage) {
    case Stage::kParse: ParseSources(); break;
    case Stage::kCoverage: CollectCoverage(); break;
    case Stage::kMutate: GenerateMutants(); break;
    case Stage::kBuild: BuildMutants(); break;
    case Stage::kTce: PartitionMutants(); break;
    case Stage::kSample: SampleMutants(); break;
    case Stage::kPrioritize: PrioritizeMutants(); break;
    case Stage::kFuzz:
      FuzzMutants();
      if (options_.fuzz_only) return;
      break;
    case Stage::kReport: WriteReport(); break;
  }
  MarkDone(stage);
}

// ---------------------------------------------------------------- state

void Pipeline::LoadState() {
  const fs::path dir = StateDir();
  if (fs::exists(dir / "stages.txt")) {
    for (const std::string& line : SplitLines(ReadFile(dir / "stages.txt"))) {
      if (auto stage = ParseStage(Trim(line))) done_.insert(*stage);
    }
  }
  if (fs::exists(dir / "matrix.tsv")) matrix_ = covtrace::ParseMatrix(ReadFile(dir / "matrix.tsv"));
  if (fs::exists(dir / "original_tests.tsv")) {
    for (const std::string& line : SplitLines(ReadFile(dir / "original_tests.tsv"))) {
      auto fields = Split(line, '\t');
      if (fields.size() == 2) original_passed_[UnescapeField(fields[0])] = fields[1] == "pass";
    }
  }
  if (fs::exists(dir / "coverage.txt")) {
    statement_coverage_ = ParseReal(Value(ReadKeyValues(dir / "coverage.txt"), "statement_coverage"));
  }
  if (fs::exists(dir / "mutants.tsv")) mutants_ = mutgen::ParseManifest(ReadFile(dir / "mutants.tsv"));
  if (fs::exists(dir / "executions.tsv")) {
    for (const std::string& line : SplitLines(ReadFile(dir / "executions.tsv"))) {
      if (line.empty() || line[0] == '#') continue;
      auto fields = Split(line, '\t');
      if (fields.size() != 6) throw Error(ErrorCode::kFormatError, "executions.tsv: " + line);
      auto status = mutgen::ParseStatus(fields[1]);
      if (!status) throw Error(ErrorCode::kFormatError, "executions.tsv: " + fields[1]);
      Execution e;
      e.status = *status;
      e.tests_run = std::stoul(fields[2]);
      e.killing_test = UnescapeField(fields[3]);
      for (const std::string& t : Split(UnescapeField(fields[4]), ',')) {
        if (!t.empty()) e.ordered_tests.push_back(t);
      }
      e.note = UnescapeField(fields[5]);
      executions_[UnescapeField(fields[0])] = std::move(e);
    }
  }
  if (fs::exists(dir / "fsci.txt")) {
    auto kv = ReadKeyValues(dir / "fsci.txt");
    FsciSummary f;
    f.estimate = ParseReal(Value(kv, "estimate"));
    f.lower = ParseReal(Value(kv, "lower"));
    f.upper = ParseReal(Value(kv, "upper"));
    f.alpha = ParseReal(Value(kv, "alpha"));
    f.width = ParseReal(Value(kv, "width"));
    f.stopped_by = Value(kv, "stopped_by");
    f.examined = std::stoul("0" + Value(kv, "examined"));
    f.kills = std::stoul("0" + Value(kv, "kills"));
    if (kv.count("trace")) f.trace = kv["trace"];
    fsci_ = f;
  }
  for (const Mutant& m : mutants_) {
    const fs::path result = dir / "fuzz" / m.id / "result.txt";
    if (!fs::exists(result)) continue;
    const std::string unit_test = Value(ReadKeyValues(result), "unit_test");
    if (!unit_test.empty()) unit_tests_[m.id] = unit_test;
  }
}

void Pipeline::SaveManifest() {
  WriteFileAtomic(StateDir() / "mutants.tsv", mutgen::FormatManifest(mutants_));
}

void Pipeline::SaveExecutions() {
  std::string text = "# id\tstatus\ttests_run\tkilling_test\tordered_tests\tnote\n";
  for (const auto& [id, e] : executions_) {
    text += EscapeField(id) + "\t" + std::string(mutgen::StatusName(e.status)) + "\t" +
            std::to_string(e.tests_run) + "\t" + EscapeField(e.killing_test) + "\t" +
            EscapeField(Join(e.ordered_tests, ',')) + "\t" + EscapeField(e.note) + "\n";
  }
  WriteFileAtomic(StateDir() / "executions.tsv", text);
}

Mutant& Pipeline::Find(const std::string& id) {
  for (Mutant& m : mutants_) {
    if (m.id == id) return m;
  }
  throw Error(ErrorCode::kBadValue, "unknown mutant " + id);
}

// ---------------------------------------------------------------- stages

void Pipeline::ParseSources() {
  std::string text;
  for (const std::string& source : config_.sources) {
    const cfront::SourceUnit& u = unit(source);
    for (cfront::NodeId fn : u.FunctionDefinitions()) {
      text += EscapeField(source) + "\t" + EscapeField(u.FunctionName(fn)) + "\n";
    }
  }
  WriteFileAtomic(StateDir() / "functions.tsv", text);
}

buildctl::Workspace& Pipeline::CoverageBuild() {
  if (!coverage_workspace_) {
    const fs::path root = StateDir() / kCoverageDirName;
    if (!fs::exists(root)) throw Error(ErrorCode::kIoError, "coverage build missing; rerun coverage");
    buildctl::BuildConfig build = config_.build;
    build.levels = {"O0"};
    coverage_workspace_ = std::make_unique<buildctl::Workspace>(root, build);
  }
  return *coverage_workspace_;
}

covtrace::CollectOptions Pipeline::CoverageRunOptions() const {
  covtrace::CollectOptions options;
  const fs::path root = StateDir() / kCoverageDirName;
  options.binary = root / config_.build.artifact;
  options.cwd = root;
  options.timeout = config_.test_timeout;
  options.missing_as_zero = true;
  return options;
}

void Pipeline::CollectCoverage() {
  const fs::path root = StateDir() / kCoverageDirName;
  coverage_workspace_.reset();
  fs::remove_all(root);
  CopyWorkspace(config_.workspace, root);
  for (std::size_t k = 0; k < config_.sources.size(); ++k) {
    const std::string& source = config_.sources[k];
    covtrace::InstrumentOptions options;
    options.mode = covtrace::InstrumentMode::kStatements;
    options.unit_index = static_cast<int>(k);
    options.header_path = std::string(kCoverageHeaderName);
    WriteFile(root / source, covtrace::Instrument(unit(source), options));
    WriteFile((root / source).parent_path() / kCoverageHeaderName, CoverageHeaderSource());
  }
  const buildctl::LevelResult built = CoverageBuild().Build("O0");
  if (!built.ok) {
    throw Error(ErrorCode::kIoError, "instrumented build failed: " + built.diagnostic);
  }

  covtrace::CollectResult result = covtrace::Collect(tests_, layout_, CoverageRunOptions());
  matrix_ = std::move(result.matrix);
  original_passed_.clear();
  std::string passed_text;
  for (const covtrace::TestRun& run : result.runs) {
    original_passed_[run.id] = run.passed;
    passed_text += EscapeField(run.id) + "\t" + (run.passed ? "pass" : "fail") + "\n";
    if (!run.passed) Log("test " + run.id + " fails on the original and is ignored");
  }
  std::size_t covered = 0;
  for (std::size_t s = 0; s < matrix_.statements.size(); ++s) {
    if (!matrix_.CoveringTests(s).empty()) ++covered;
  }
  statement_coverage_ = matrix_.statements.empty()
                            ? 0.0
                            : static_cast<double>(covered) / matrix_.statements.size();
  WriteFileAtomic(StateDir() / "matrix.tsv", covtrace::FormatMatrix(matrix_));
  WriteFileAtomic(StateDir() / "original_tests.tsv", passed_text);
  WriteFileAtomic(StateDir() / "coverage.txt",
                  "statement_coverage " + FormatReal(statement_coverage_) + "\n");
}

void Pipeline::GenerateMutants() {
  mutants_.clear();
  std::set<std::string> ids;
  for (const std::string& source : config_.sources) {
    mutgen::CoveredSet covered;
    for (std::size_t s = 0; s < matrix_.statements.size(); ++s) {
      if (matrix_.statements[s].file == source && !matrix_.CoveringTests(s).empty()) {
        covered.insert(matrix_.statements[s].ordinal);
      }
    }
    const cfront::SourceUnit& u = unit(source);
    for (Mutant& m : mutgen::GenerateMutants(u, mutgen::EnumeratePoints(u, covered))) {
      if (!ids.insert(m.id).second) {
        throw Error(ErrorCode::kBadValue, "duplicate mutant id " + m.id + "; sources share a name");
      }
      mutants_.push_back(std::move(m));
    }
  }
  Log(std::to_string(mutants_.size()) + " mutants on covered statements");
  executions_.clear();
  unit_tests_.clear();
  fsci_.reset();
  for (const char* stale : {"digests.txt", "executions.tsv", "fsci.txt"}) {
    fs::remove(StateDir() / stale);
  }
  fs::remove_all(StateDir() / "fuzz");
  SaveManifest();
}

void Pipeline::BuildMutants() {
  buildctl::Workspace workspace(config_.workspace, config_.build);
  const fs::path digests = StateDir() / "digests.txt";
  std::vector<buildctl::BuildOutcome> outcomes;
  if (fs::exists(digests)) outcomes = buildctl::ParseDigests(ReadFile(digests));
  // Records missing a configured level are rebuilt.
  std::erase_if(outcomes, [&](const buildctl::BuildOutcome& o) {
    return std::any_of(config_.build.levels.begin(), config_.build.levels.end(),
                       [&](const std::string& level) { return !o.per_level.count(level); });
  });
  std::set<std::string> built;
  for (const auto& outcome : outcomes) built.insert(outcome.id);
  auto save = [&] { WriteFileAtomic(digests, buildctl::FormatDigests(outcomes)); };

  if (!built.count(std::string(buildctl::kOriginalId))) {
    buildctl::BuildOutcome original = workspace.BuildAllLevels(std::string(buildctl::kOriginalId));
    for (const auto& [level, result] : original.per_level) {
      if (!result.ok) {
        throw Error(ErrorCode::kIoError,
                    "the original does not build at " + level + ": " + result.diagnostic);
      }
    }
    outcomes.push_back(std::move(original));
    save();
  }
  std::size_t done = 0;
  for (const Mutant& m : mutants_) {
    ++done;
    if (built.count(m.id)) continue;
    buildctl::SourceSwap swap{m.file, mutgen::Materialize(unit(m.file), m)};
    buildctl::BuildOutcome outcome;
    try {
      outcome = workspace.BuildAllLevels(m.id, swap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTimeout) throw;
      outcome.id = m.id;
      for (const std::string& level : config_.build.levels) {
        outcome.per_level[level] = {false, "", -1, e.what()};
      }
    }
    outcomes.push_back(std::move(outcome));
    save();
    Log("built " + std::to_string(done) + "/" + std::to_string(mutants_.size()) + " " + m.id);
  }
}

void Pipeline::PartitionMutants() {
  const std::vector<buildctl::BuildOutcome> outcomes =
      buildctl::ParseDigests(ReadFile(StateDir() / "digests.txt"));
  const buildctl::TcePartition partition = buildctl::Partition(outcomes, config_.build.levels);
  std::map<std::string, std::string> redundant_with;
  for (const auto& group : partition.redundant_groups) {
    const std::string representative = buildctl::TcePartition::Representative(group);
    for (const std::string& id : group) {
      if (id != representative) redundant_with[id] = representative;
    }
  }
  std::map<std::string, const buildctl::BuildOutcome*> by_id;
  for (const auto& outcome : outcomes) by_id[outcome.id] = &outcome;
  for (Mutant& m : mutants_) {
    if (m.status != MutantStatus::kGenerated) continue;
    if (partition.equivalent.count(m.id)) {
      m.SetStatus(MutantStatus::kTceEquivalent);
      m.note = "same binary as the original";
    } else if (partition.compile_failed.count(m.id)) {
      m.SetStatus(MutantStatus::kCompileFailed);
      for (const auto& [level, result] : by_id.at(m.id)->per_level) {
        if (!result.ok) {
          m.note = level + ": " + FirstLine(result.diagnostic);
          break;
        }
      }
    } else if (auto it = redundant_with.find(m.id); it != redundant_with.end()) {
      m.SetStatus(MutantStatus::kTceRedundant);
      m.note = "same binary as " + it->second;
    }
  }
  SaveManifest();
}

void Pipeline::SampleMutants() {
  std::vector<Mutant> pool;
  for (const Mutant& m : mutants_) {
    if (m.status == MutantStatus::kGenerated) pool.push_back(m);
  }
  const SamplingConfig& s = config_.sampling;
  std::set<std::string> keep;
  std::string dropped_note;
  switch (s.strategy) {
    case SamplingStrategy::kNone:
      return SaveManifest();
    case SamplingStrategy::kUniform:
    case SamplingStrategy::kMethod:
    case SamplingStrategy::kFixed: {
      const sampler::Strategy strategy =
          s.strategy == SamplingStrategy::kUniform  ? sampler::Strategy::Uniform(s.ratio)
          : s.strategy == SamplingStrategy::kMethod ? sampler::Strategy::Method(s.ratio)
                                                    : sampler::Strategy::Fixed(s.size);
      for (const Mutant& m : sampler::Sample(pool, strategy, s.seed)) keep.insert(m.id);
      dropped_note = "not drawn by " + std::string(SamplingStrategyName(s.strategy)) + " sampling";
      break;
    }
    case SamplingStrategy::kFsci: {
      const sampler::FsciResult result = sampler::Fsci(
          pool, [this](const Mutant& m) { return mutgen::IsKilled(Execute(m).status); },
          s.width, s.alpha, s.seed);
      FsciSummary summary;
      summary.estimate = result.estimate;
      summary.lower = result.interval.lower;
      summary.upper = result.interval.upper;
      summary.alpha = result.alpha;
      summary.width = result.threshold_w;
      summary.stopped_by = std::string(sampler::StopReasonName(result.stopped_by));
      summary.examined = result.examined.size();
      for (const auto& [id, killed] : result.examined) {
        keep.insert(id);
        if (killed) ++summary.kills;
      }
      for (const sampler::FsciStep& step : result.trace) {
        summary.trace.push_back(sampler::FormatTraceLine(step));
      }
      std::string text = "estimate " + FormatReal(summary.estimate) + "\nlower " +
                         FormatReal(summary.lower) + "\nupper " + FormatReal(summary.upper) +
                         "\nalpha " + FormatReal(summary.alpha) + "\nwidth " +
                         FormatReal(summary.width) + "\nstopped_by " + summary.stopped_by +
                         "\nexamined " + std::to_string(summary.examined) + "\nkills " +
                         std::to_string(summary.kills) + "\n";
      for (const std::string& line : summary.trace) text += "trace " + line + "\n";
      WriteFileAtomic(StateDir() / "fsci.txt", text);
      fsci_ = std::move(summary);
      dropped_note = "not examined before the interval was narrow enough";
      break;
    }
  }
  for (Mutant& m : mutants_) {
    if (m.status == MutantStatus::kGenerated && !keep.count(m.id)) {
      m.SetStatus(MutantStatus::kSampledOut);
      m.note = dropped_note;
    }
  }
  SaveManifest();
}

const Pipeline::Execution& Pipeline::Execute(const Mutant& mutant) {
  if (auto it = executions_.find(mutant.id); it != executions_.end()) return it->second;

  Execution e;
  std::vector<std::string> covering;
  for (const std::string& test : prioritizer::CoveringTests(mutant, matrix_)) {
    if (original_passed_[test]) covering.push_back(test);
  }
  e.ordered_tests = prioritizer::OrderTests(covering, matrix_);
  if (e.ordered_tests.empty()) {
    e.status = MutantStatus::kLive;
    e.note = "no passing test reaches it";
  } else {
    const std::size_t k = static_cast<std::size_t>(
        std::find(config_.sources.begin(), config_.sources.end(), mutant.file) -
        config_.sources.begin());
    covtrace::InstrumentOptions options;
    options.mode = covtrace::InstrumentMode::kStatements;
    options.unit_index = static_cast<int>(k);
    options.header_path = std::string(kCoverageHeaderName);
    const std::string instrumented = covtrace::Instrument(
        unit(mutant.file), options, cfront::Patch{mutant.span, mutant.replacement_fragment});
    const buildctl::LevelResult built =
        CoverageBuild().Build("O0", buildctl::SourceSwap{mutant.file, instrumented});
    if (!built.ok) {
      e.status = MutantStatus::kLive;
      e.note = "instrumented build failed: " + FirstLine(built.diagnostic);
    } else {
      std::vector<covtrace::CoverageMatrix> rows;
      covtrace::CoverageMatrix mutant_matrix;
      mutant_matrix.statements = matrix_.statements;
      for (const std::string& test_id : e.ordered_tests) {
        auto test = std::find_if(tests_.begin(), tests_.end(),
                                 [&](const covtrace::TestCase& t) { return t.id == test_id; });
        if (test == tests_.end()) throw Error(ErrorCode::kBadValue, "unknown test " + test_id);
        covtrace::CollectResult run = covtrace::Collect({*test}, layout_, CoverageRunOptions());
        ++e.tests_run;
        const covtrace::TestRun& result = run.runs.front();
        if (!result.passed) {
          const bool crashed = result.process.signaled || result.process.timed_out;
          e.status = crashed ? MutantStatus::kKilledCrash : MutantStatus::kKilledDiff;
          e.killing_test = test_id;
          e.note = "killed by test " + test_id +
                   (result.process.timed_out ? " (timeout)" : crashed ? " (crash)" : "");
          break;
        }
        mutant_matrix.tests.push_back(test_id);
        mutant_matrix.counts.push_back(run.matrix.counts.front());
      }
      if (e.killing_test.empty()) {
        const auto original = prioritizer::ConcatenateRows(matrix_, e.ordered_tests);
        const auto mutated = prioritizer::ConcatenateRows(mutant_matrix, e.ordered_tests);
        if (prioritizer::LikelyEquivalent(original, mutated)) {
          e.status = MutantStatus::kLikelyEquivalent;
          e.note = "coverage parallel to the original over " +
                   std::to_string(e.tests_run) + " tests";
        } else {
          e.status = MutantStatus::kLive;
          e.note = "survived " + std::to_string(e.tests_run) + " tests";
        }
      }
    }
  }
  auto [it, inserted] = executions_.emplace(mutant.id, std::move(e));
  SaveExecutions();
  Log("executed " + mutant.id + ": " + std::string(mutgen::StatusName(it->second.status)));
  return it->second;
}

void Pipeline::PrioritizeMutants() {
  for (Mutant& m : mutants_) {
    if (m.status != MutantStatus::kGenerated) continue;
    const Execution& e = Execute(m);
    m.SetStatus(e.status);
    m.note = e.note;
  }
  SaveManifest();
}

std::set<std::string> Pipeline::FuzzTargets() const {
  std::optional<std::set<std::string>> listed;
  if (config_.fuzz.kill_list) {
    listed.emplace();
    for (const std::string& line : SplitLines(ReadFile(*config_.fuzz.kill_list))) {
      std::string id = Trim(line.substr(0, line.find('#')));
      if (!id.empty()) listed->insert(id);
    }
  }
  std::set<std::string> targets;
  for (const Mutant& m : mutants_) {
    // Everything the existing tests left alive; a kill overturns a
    // likely-equivalent verdict.
    if (m.status != MutantStatus::kLive && m.status != MutantStatus::kLikelyEquivalent) continue;
    if (listed && !listed->count(m.id)) continue;
    if (options_.fuzz_only && !options_.fuzz_only->count(m.id)) continue;
    targets.insert(m.id);
  }
  return targets;
}

Pipeline::FuzzOutcome Pipeline::Fuzz(const Mutant& mutant) {
  const fs::path dir = StateDir() / "fuzz" / mutant.id;
  const fs::path result_file = dir / "result.txt";
  FuzzOutcome out;
  if (fs::exists(result_file)) {
    auto kv = ReadKeyValues(result_file);
    auto status = mutgen::ParseStatus(Value(kv, "status"));
    if (!status) throw Error(ErrorCode::kFormatError, result_file.string());
    out.status = *status;
    out.note = UnescapeField(Value(kv, "note"));
    out.unit_test = Value(kv, "unit_test");
    return out;
  }
  fs::remove_all(dir);
  fs::create_directories(dir);
  try {
    const cfront::SourceUnit& subject = unit(mutant.file);
    fuzzer::DriverBuildOptions build;
    build.compiler = config_.fuzz.compiler;
    build.cflags.push_back("-I" + (config_.workspace / mutant.file).parent_path().string());
    const fuzzer::DriverFiles files = fuzzer::PrepareDrivers(
        subject, mutant.function, cfront::Patch{mutant.span, mutant.replacement_fragment},
        dir / "drivers", build);
    fuzzer::CampaignOptions campaign;
    campaign.mutant_id = mutant.id;
    campaign.driver = files.driver;
    campaign.nondet_driver = files.nondet_driver;
    campaign.seeds = files.seeds;
    campaign.budget.max_seconds = options_.fuzz_budget_s.value_or(config_.fuzz.budget_s);
    campaign.budget.max_execs = config_.fuzz.max_execs;
    campaign.workdir = dir / "campaign";
    campaign.rng_seed = MixSeed(config_.fuzz.seed, mutant.id);
    campaign.keep_going = config_.fuzz.keep_going;
    campaign.exec_timeout = config_.fuzz.exec_timeout;
    const fuzzer::CampaignResult result = fuzzer::RunCampaign(campaign);
    switch (result.verdict) {
      case fuzzer::CampaignVerdict::kNotRun:
        out.note = "fuzzing did not run: " + FirstLine(result.error);
        break;
      case fuzzer::CampaignVerdict::kLive:
        out.note = "survived " + std::to_string(result.executions) + " fuzzing executions";
        if (result.rejected_kills > 0) {
          out.note += "; " + std::to_string(result.rejected_kills) +
                      " differences did not reproduce on the original alone";
        }
        break;
      case fuzzer::CampaignVerdict::kKilledDiff:
      case fuzzer::CampaignVerdict::kKilledCrash:
        out.status = result.verdict == fuzzer::CampaignVerdict::kKilledDiff
                         ? MutantStatus::kKilledDiff
                         : MutantStatus::kKilledCrash;
        out.note = "killed by fuzzing after " + std::to_string(result.executions) + " executions";
        try {
          out.unit_test = EmitUnitTest(mutant, *result.killing_input, dir / "unit");
        } catch (const Error& e) {
          out.note += "; no unit test: " + FirstLine(e.what());
        }
        break;
    }
  } catch (const Error& e) {
    out.status = MutantStatus::kLive;
    out.note = (e.code() == ErrorCode::kUnsupportedSignature ? "unsupported signature: "
                                                             : "fuzzing failed: ") +
               FirstLine(e.what());
  }
  std::string text = "status " + std::string(mutgen::StatusName(out.status)) + "\nnote " +
                     EscapeField(out.note) + "\n";
  if (!out.unit_test.empty()) text += "unit_test " + out.unit_test + "\n";
  WriteFileAtomic(result_file, text);
  return out;
}

std::string Pipeline::EmitUnitTest(const Mutant& mutant, const std::string& killing_input,
                                   const fs::path& dir) {
  const cfront::SourceUnit& subject = unit(mutant.file);
  const auto sig = cfront::FindSignature(subject, mutant.function);
  if (!sig) throw Error(ErrorCode::kUnknownStatement, "no function " + mutant.function);
  fs::create_directories(dir);
  WriteFile(dir / "original.c", subject.text);
  WriteFile(dir / "mutant.c", mutgen::Materialize(subject, mutant));
  WriteFile(dir / "input.bin", killing_input);
  WriteRuntimeFiles(dir);
  const std::string include = "-I" + (config_.workspace / mutant.file).parent_path().string();
  const std::string& cc = config_.fuzz.compiler;

  WriteFile(dir / "capture.c",
            fuzzdrv::GenerateCaptureDriver(
                *sig, std::string(kUnitTestPrelude) + "#include \"mutafuzz_rt.h\"\n"));
  Compile({cc, "-O0", "-w", "-I", dir.string(), include, "-o", "capture",
           std::string(kRuntimeSourceName), "capture.c"},
          dir);
  const ProcessResult capture =
      RunProcess({{(dir / "capture").string(), "input.bin"},
                  dir,
                  {{"MUTAFUZZ_DUMP_FILE", (dir / "dump.txt").string()}},
                  config_.fuzz.exec_timeout * 10,
                  true});
  if (!capture.Succeeded() || !fs::exists(dir / "dump.txt")) {
    throw Error(ErrorCode::kIoError, "capturing expected values failed: " +
                                         DescribeProcessResult(capture));
  }
  const auto expected = fuzzdrv::ParseDump(ReadFile(dir / "dump.txt"));

  const std::string name = "test_" + mutant.id + ".c";
  WriteFile(dir / name,
            fuzzdrv::GenerateUnitTest(*sig, kUnitTestPrelude, killing_input, expected));
  Compile({cc, "-O0", "-w", include, "-o", "test_original", name}, dir);
  Compile({cc, "-O0", "-w", include, "-DMUTAFUZZ_SUBJECT=\"mutant.c\"", "-o", "test_mutant", name},
          dir);
  const auto timeout = config_.fuzz.exec_timeout * 10;
  const ProcessResult on_original =
      RunProcess({{(dir / "test_original").string()}, dir, {}, timeout, true});
  if (!on_original.Succeeded()) {
    throw Error(ErrorCode::kIoError, "emitted test fails on the original: " +
                                         DescribeProcessResult(on_original));
  }
  const ProcessResult on_mutant =
      RunProcess({{(dir / "test_mutant").string()}, dir, {}, timeout, true});
  if (on_mutant.Succeeded()) {
    throw Error(ErrorCode::kIoError, "emitted test passes on the mutant");
  }
  return fs::relative(dir / name, config_.workspace).string();
}

void Pipeline::FuzzMutants() {
  const std::set<std::string> target_set = FuzzTargets();
  std::vector<Mutant> targets;
  for (const Mutant& m : mutants_) {
    if (target_set.count(m.id)) targets.push_back(m);
  }
  Log(std::to_string(targets.size()) + " mutants to fuzz");
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= targets.size()) return;
      try {
        const FuzzOutcome outcome = Fuzz(targets[i]);
        std::lock_guard<std::mutex> lock(mutex);
        Mutant& m = Find(targets[i].id);
        if (mutgen::IsKilled(outcome.status)) m.SetStatus(outcome.status);
        m.note = outcome.note;
        if (!outcome.unit_test.empty()) unit_tests_[m.id] = outcome.unit_test;
        SaveManifest();
        Log("fuzzed " + m.id + ": " + std::string(mutgen::StatusName(m.status)));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!failure) failure = std::current_exception();
        next = targets.size();
      }
    }
  };
  const unsigned count =
      static_cast<unsigned>(std::min<std::size_t>(config_.workers, targets.size()));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < count; ++t) threads.emplace_back(worker);
  if (count > 0) worker();
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- report

Report Pipeline::WriteReport() {
  for (Mutant& m : mutants_) {
    if (m.status == MutantStatus::kGenerated) {
      m.SetStatus(MutantStatus::kLive);
      m.note = "not executed";
    }
  }
  SaveManifest();

  Report report;
  std::vector<MutantStatus> sampled;
  for (MutantStatus status : kAllStatuses) report.counts[std::string(mutgen::StatusName(status))] = 0;
  for (const Mutant& m : mutants_) {
    ++report.counts[std::string(mutgen::StatusName(m.status))];
    if (m.status != MutantStatus::kSampledOut) sampled.push_back(m.status);
    MutantRecord record;
    record.id = m.id;
    record.file = m.file;
    record.function = m.function;
    record.op = std::string(mutgen::OperatorName(m.op));
    record.statement = m.statement_ordinal;
    record.status = std::string(mutgen::StatusName(m.status));
    record.note = m.note;
    if (auto it = unit_tests_.find(m.id); it != unit_tests_.end()) record.unit_test = it->second;
    report.mutants.push_back(std::move(record));
  }
  report.score = ComputeMutationScore(sampled);
  if (!report.score.warning.empty()) Log("warning: " + report.score.warning);
  report.total_mutants = mutants_.size();
  report.statement_coverage = statement_coverage_;
  report.executed_mutants = executions_.size();
  report.fsci = fsci_;
  fs::create_directories(config_.report.parent_path());
  WriteFileAtomic(config_.report, FormatReportJson(report));
  return report;
}

}  // namespace mutafuzz::orchestrator
