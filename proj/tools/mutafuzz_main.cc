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

// mutafuzz command line. Subcommands taking --config run the pipeline up to
// their stage, reusing whatever earlier runs left in <workspace>/.mutafuzz.
// The others work on single files and print to stdout.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mutafuzz/buildctl/buildctl.h"
#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/covtrace/covtrace.h"
#include "mutafuzz/mutgen/mutgen.h"
#include "mutafuzz/orchestrator/config.h"
#include "mutafuzz/orchestrator/pipeline.h"
#include "mutafuzz/prioritizer/prioritizer.h"
#include "mutafuzz/sampler/sampler.h"

namespace fs = std::filesystem;
using namespace mutafuzz;

namespace {

struct Common {
  std::string config = "mutafuzz.conf";
  bool quiet = false;
};

orchestrator::PipelineOptions Options(const Common& common) {
  orchestrator::PipelineOptions options;
  if (!common.quiet) {
    options.progress = [](const std::string& line) { std::cerr << "mutafuzz: " << line << "\n"; };
  }
  return options;
}

int RunStage(const Common& common, orchestrator::Stage stage,
             orchestrator::PipelineOptions options) {
  orchestrator::Pipeline pipeline(orchestrator::LoadConfig(common.config), std::move(options));
  if (stage == orchestrator::Stage::kReport) {
    std::cout << orchestrator::FormatSummary(pipeline.Run());
    return 0;
  }
  pipeline.RunThrough(stage);
  std::cerr << "mutafuzz: " << orchestrator::StageName(stage) << " done, state in "
            << pipeline.StateDir().string() << "\n";
  return 0;
}

std::vector<std::uint64_t> ParseVector(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : Split(text, ',')) {
    const std::string trimmed = Trim(item);
    if (trimmed.empty()) continue;
    std::size_t used = 0;
    const unsigned long long v = std::stoull(trimmed, &used);
    if (used != trimmed.size()) throw Error(ErrorCode::kBadValue, "vector element " + trimmed);
    out.push_back(v);
  }
  return out;
}

int ParseCommand(const std::string& file, bool dump_ast, bool signatures) {
  const cfront::SourceUnit unit = cfront::Parse(ReadFile(file), file);
  if (dump_ast) {
    std::cout << cfront::DumpAst(unit);
    return 0;
  }
  std::cout << "# ordinal\tfunction\tbegin\tend\tkind\ttext\n";
  for (std::size_t i = 0; i < unit.statements.size(); ++i) {
    const cfront::Node& node = unit.node(unit.statements[i]);
    const cfront::NodeId fn = unit.EnclosingFunction(node.span);
    std::string text(unit.Text(node.span));
    text = text.substr(0, text.find('\n'));
    std::cout << i << '\t' << (fn == cfront::kNoNode ? "" : unit.FunctionName(fn)) << '\t'
              << node.span.begin << '\t' << node.span.end << '\t'
              << cfront::NodeKindName(node.kind) << '\t' << EscapeField(text) << '\n';
  }
  if (signatures) {
    std::cout << "# signatures\n";
    for (cfront::NodeId fn : unit.FunctionDefinitions()) {
      std::cout << cfront::PrototypeText(unit, fn) << "\n";
    }
  }
  return 0;
}

int MutateCommand(const std::string& file, const std::string& coverage, const std::string& out) {
  const cfront::SourceUnit unit = cfront::Parse(ReadFile(file), file);
  std::optional<mutgen::CoveredSet> covered;
  if (!coverage.empty()) {
    const covtrace::CoverageMatrix matrix = covtrace::ParseMatrix(ReadFile(coverage));
    covered.emplace();
    for (std::size_t s = 0; s < matrix.statements.size(); ++s) {
      if (matrix.statements[s].file == file && !matrix.CoveringTests(s).empty()) {
        covered->insert(matrix.statements[s].ordinal);
      }
    }
  }
  const auto mutants = mutgen::GenerateMutants(unit, mutgen::EnumeratePoints(unit, covered));
  fs::create_directories(out);
  const std::string extension = fs::path(file).extension().string();
  for (const mutgen::Mutant& m : mutants) {
    WriteFile(fs::path(out) / (m.id + extension), mutgen::Materialize(unit, m));
  }
  WriteFile(fs::path(out) / "manifest.tsv", mutgen::FormatManifest(mutants));
  std::cout << mutants.size() << " mutants written to " << out << "\n";
  return 0;
}

int BuildManifestCommand(const Common& common, const std::string& manifest) {
  const orchestrator::Config config = orchestrator::LoadConfig(common.config);
  buildctl::Workspace workspace(config.workspace, config.build);
  std::vector<buildctl::BuildOutcome> outcomes = {
      workspace.BuildAllLevels(std::string(buildctl::kOriginalId))};
  std::map<std::string, cfront::SourceUnit> units;
  for (const mutgen::Mutant& m : mutgen::ParseManifest(ReadFile(manifest))) {
    auto it = units.find(m.file);
    if (it == units.end()) {
      it = units.emplace(m.file, cfront::Parse(ReadFile(config.workspace / m.file), m.file)).first;
    }
    outcomes.push_back(workspace.BuildAllLevels(
        m.id, buildctl::SourceSwap{m.file, mutgen::Materialize(it->second, m)}));
  }
  std::cout << buildctl::FormatDigests(outcomes);
  return 0;
}

int TceCommand(const std::string& outcomes_file, const std::string& levels) {
  const auto outcomes = buildctl::ParseDigests(ReadFile(outcomes_file));
  std::vector<std::string> level_list;
  for (const std::string& l : Split(levels, ',')) {
    if (!Trim(l).empty()) level_list.push_back(Trim(l));
  }
  if (level_list.empty()) {
    std::set<std::string> seen;
    for (const auto& outcome : outcomes) {
      for (const auto& [level, result] : outcome.per_level) {
        if (seen.insert(level).second) level_list.push_back(level);
      }
    }
  }
  const buildctl::TcePartition p = buildctl::Partition(outcomes, level_list);
  for (const std::string& id : p.equivalent) std::cout << id << "\ttce-equivalent\n";
  for (const std::string& id : p.compile_failed) std::cout << id << "\tcompile-failed\n";
  for (const auto& group : p.redundant_groups) {
    const std::string rep = buildctl::TcePartition::Representative(group);
    for (const std::string& id : group) {
      if (id != rep) std::cout << id << "\ttce-redundant\t" << rep << "\n";
    }
  }
  for (const std::string& id : p.Survivors()) std::cout << id << "\tsurvivor\n";
  return 0;
}

int SampleCommand(const std::string& manifest, const std::string& strategy, double ratio,
                  std::size_t n, std::uint64_t seed, double w, double alpha,
                  const std::string& kills_file) {
  const auto mutants = mutgen::ParseManifest(ReadFile(manifest));
  if (strategy == "fsci") {
    std::set<std::string> kills;
    if (!kills_file.empty()) {
      for (const std::string& line : SplitLines(ReadFile(kills_file))) {
        if (!Trim(line).empty()) kills.insert(Trim(line));
      }
    }
    const auto result = sampler::Fsci(
        mutants, [&](const mutgen::Mutant& m) { return kills.count(m.id) > 0; }, w, alpha, seed);
    for (const auto& step : result.trace) std::cout << sampler::FormatTraceLine(step) << "\n";
    std::printf("estimate %.6f interval [%.6f, %.6f] stopped_by %s\n", result.estimate,
                result.interval.lower, result.interval.upper,
                std::string(sampler::StopReasonName(result.stopped_by)).c_str());
    return 0;
  }
  sampler::Strategy s;
  if (strategy == "uniform") {
    s = sampler::Strategy::Uniform(ratio);
  } else if (strategy == "method") {
    s = sampler::Strategy::Method(ratio);
  } else {
    s = sampler::Strategy::Fixed(n);
  }
  for (const mutgen::Mutant& m : sampler::Sample(mutants, s, seed)) std::cout << m.id << "\n";
  return 0;
}

int PrioritizeCommand(const std::string& matrix_file, const std::string& manifest,
                      const std::string& id) {
  const auto matrix = covtrace::ParseMatrix(ReadFile(matrix_file));
  for (const mutgen::Mutant& m : mutgen::ParseManifest(ReadFile(manifest))) {
    if (m.id != id) continue;
    for (const std::string& test :
         prioritizer::OrderTests(prioritizer::CoveringTests(m, matrix), matrix)) {
      std::cout << test << "\n";
    }
    return 0;
  }
  throw Error(ErrorCode::kBadValue, "no mutant " + id + " in " + manifest);
}

int EquivCheckCommand(const std::string& orig, const std::string& mut) {
  const auto u = ParseVector(orig);
  const auto v = ParseVector(mut);
  const bool equivalent = prioritizer::LikelyEquivalent(u, v);
  std::printf("%s cosine_distance=%.17g\n", equivalent ? "likely-equivalent" : "distinct",
              prioritizer::CosineDistance(u, v));
  return equivalent ? 0 : 1;
}

int CoverageCommand(const std::string& binary, const std::string& tests_file,
                    const std::vector<std::string>& sources, const std::string& out,
                    unsigned timeout_s) {
  covtrace::CoverageLayout layout;
  for (const std::string& source : sources) {
    layout.files.push_back(source);
    layout.statements.push_back(cfront::Parse(ReadFile(source), source).statements.size());
  }
  covtrace::CollectOptions options;
  options.binary = fs::absolute(binary);
  options.timeout = std::chrono::seconds(timeout_s);
  const auto result =
      covtrace::Collect(covtrace::ParseTestList(ReadFile(tests_file)), layout, options);
  WriteFileAtomic(out, covtrace::FormatMatrix(result.matrix));
  for (const auto& run : result.runs) {
    std::cout << run.id << "\t" << (run.passed ? "pass" : "fail") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mutation analysis and fuzzing-based mutant killing for C"};
  app.require_subcommand(1);
  Common common;
  auto add_config = [&](CLI::App* sub, bool required) {
    auto* option = sub->add_option("--config", common.config, "configuration file");
    if (required) option->capture_default_str();
    sub->add_flag("-q,--quiet", common.quiet, "no progress messages");
  };
  std::function<int()> action;

  auto* parse = app.add_subcommand("parse", "statement index and signatures of a C file");
  std::string parse_file;
  bool dump_ast = false;
  bool signatures = false;
  parse->add_option("file", parse_file)->required()->check(CLI::ExistingFile);
  parse->add_flag("--dump-ast", dump_ast);
  parse->add_flag("--signatures", signatures);
  parse->callback([&] { action = [&] { return ParseCommand(parse_file, dump_ast, signatures); }; });

  auto* coverage = app.add_subcommand("coverage", "statement coverage matrix");
  std::string cov_binary, cov_tests, cov_out;
  std::vector<std::string> cov_sources;
  unsigned cov_timeout = 10;
  coverage->add_option("binary", cov_binary, "instrumented program");
  coverage->add_option("--tests", cov_tests)->check(CLI::ExistingFile);
  coverage->add_option("--sources", cov_sources, "instrumented files in unit order")
      ->delimiter(',');
  coverage->add_option("--out", cov_out);
  coverage->add_option("--timeout-s", cov_timeout)->capture_default_str();
  add_config(coverage, false);
  coverage->callback([&] {
    action = [&] {
      if (cov_binary.empty()) return RunStage(common, orchestrator::Stage::kCoverage, Options(common));
      if (cov_tests.empty() || cov_out.empty() || cov_sources.empty()) {
        throw CLI::ValidationError("coverage <binary> needs --tests, --sources and --out");
      }
      return CoverageCommand(cov_binary, cov_tests, cov_sources, cov_out, cov_timeout);
    };
  });

  auto* mutate = app.add_subcommand("mutate", "generate mutants");
  std::string mutate_file, mutate_coverage, mutate_out;
  mutate->add_option("file", mutate_file)->check(CLI::ExistingFile);
  mutate->add_option("--coverage", mutate_coverage, "matrix file")->check(CLI::ExistingFile);
  mutate->add_option("--out", mutate_out, "directory for mutated sources and manifest.tsv");
  add_config(mutate, false);
  mutate->callback([&] {
    action = [&] {
      if (mutate_file.empty()) return RunStage(common, orchestrator::Stage::kMutate, Options(common));
      if (mutate_out.empty()) throw CLI::ValidationError("mutate <file> needs --out");
      return MutateCommand(mutate_file, mutate_coverage, mutate_out);
    };
  });

  auto* build = app.add_subcommand("build", "compile mutants at every level");
  std::string build_manifest;
  build->add_option("--manifest", build_manifest, "print digests for these mutants")
      ->check(CLI::ExistingFile);
  add_config(build, true);
  build->callback([&] {
    action = [&] {
      if (!build_manifest.empty()) return BuildManifestCommand(common, build_manifest);
      return RunStage(common, orchestrator::Stage::kBuild, Options(common));
    };
  });

  auto* tce = app.add_subcommand("tce", "trivial compiler equivalence partition");
  std::string tce_outcomes, tce_levels;
  tce->add_option("--outcomes", tce_outcomes, "digest file")->check(CLI::ExistingFile);
  tce->add_option("--levels", tce_levels, "comma list; default: all levels in the file");
  add_config(tce, false);
  tce->callback([&] {
    action = [&] {
      if (!tce_outcomes.empty()) return TceCommand(tce_outcomes, tce_levels);
      return RunStage(common, orchestrator::Stage::kTce, Options(common));
    };
  });

  auto* sample = app.add_subcommand("sample", "sample mutants");
  std::string sample_manifest, sample_strategy = "uniform", sample_kills;
  double sample_ratio = 1.0, sample_w = 0.10, sample_alpha = 0.05;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 1;
  sample->add_option("--manifest", sample_manifest)->check(CLI::ExistingFile);
  sample->add_option("--strategy", sample_strategy)
      ->check(CLI::IsMember({"uniform", "method", "fixed", "fsci"}));
  sample->add_option("--ratio", sample_ratio);
  sample->add_option("--n", sample_n);
  sample->add_option("--seed", sample_seed);
  sample->add_option("--w", sample_w);
  sample->add_option("--alpha", sample_alpha);
  sample->add_option("--kills", sample_kills, "fsci: file with the ids of killed mutants");
  add_config(sample, false);
  sample->callback([&] {
    action = [&] {
      if (sample_manifest.empty()) return RunStage(common, orchestrator::Stage::kSample, Options(common));
      return SampleCommand(sample_manifest, sample_strategy, sample_ratio, sample_n, sample_seed,
                           sample_w, sample_alpha, sample_kills);
    };
  });

  auto* prioritize = app.add_subcommand("prioritize", "ordered tests and test execution");
  std::string prio_matrix, prio_manifest, prio_mutant;
  prioritize->add_option("--matrix", prio_matrix)->check(CLI::ExistingFile);
  prioritize->add_option("--manifest", prio_manifest)->check(CLI::ExistingFile);
  prioritize->add_option("--mutant", prio_mutant);
  add_config(prioritize, false);
  prioritize->callback([&] {
    action = [&] {
      if (prio_matrix.empty()) return RunStage(common, orchestrator::Stage::kPrioritize, Options(common));
      if (prio_manifest.empty() || prio_mutant.empty()) {
        throw CLI::ValidationError("prioritize --matrix needs --manifest and --mutant");
      }
      return PrioritizeCommand(prio_matrix, prio_manifest, prio_mutant);
    };
  });

  auto* equiv = app.add_subcommand("equiv-check", "cosine check of two coverage vectors");
  std::string equiv_orig, equiv_mut;
  equiv->add_option("--orig", equiv_orig, "comma-separated counts")->required();
  equiv->add_option("--mut", equiv_mut, "comma-separated counts")->required();
  equiv->callback([&] { action = [&] { return EquivCheckCommand(equiv_orig, equiv_mut); }; });

  auto* fuzz = app.add_subcommand("fuzz", "fuzz live mutants");
  std::vector<std::string> fuzz_mutants;
  std::optional<double> fuzz_budget;
  fuzz->add_option("--mutant", fuzz_mutants, "only these ids");
  fuzz->add_option("--budget-s", fuzz_budget, "seconds per campaign");
  add_config(fuzz, true);
  fuzz->callback([&] {
    action = [&] {
      orchestrator::PipelineOptions options = Options(common);
      if (!fuzz_mutants.empty()) {
        options.fuzz_only = std::set<std::string>(fuzz_mutants.begin(), fuzz_mutants.end());
      }
      options.fuzz_budget_s = fuzz_budget;
      return RunStage(common, orchestrator::Stage::kFuzz, std::move(options));
    };
  });

  auto* report = app.add_subcommand("report", "write the JSON report and print a summary");
  add_config(report, true);
  report->callback([&] {
    action = [&] { return RunStage(common, orchestrator::Stage::kReport, Options(common)); };
  });

  auto* run = app.add_subcommand("run", "the whole pipeline");
  bool fresh = false;
  run->add_flag("--fresh", fresh, "discard the state of earlier runs");
  add_config(run, true);
  run->callback([&] {
    action = [&] {
      if (fresh) {
        const auto config = orchestrator::LoadConfig(common.config);
        fs::remove_all(config.workspace / ".mutafuzz");
      }
      return RunStage(common, orchestrator::Stage::kReport, Options(common));
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    return action ? action() : 0;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "mutafuzz: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mutafuzz: " << e.what() << "\n";
    return 2;
  }
}
