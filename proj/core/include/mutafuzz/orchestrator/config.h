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

#ifndef MUTAFUZZ_ORCHESTRATOR_CONFIG_H_
#define MUTAFUZZ_ORCHESTRATOR_CONFIG_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/buildctl/buildctl.h"

namespace mutafuzz::orchestrator {

enum class SamplingStrategy { kNone, kUniform, kMethod, kFixed, kFsci };

std::string_view SamplingStrategyName(SamplingStrategy strategy);
std::optional<SamplingStrategy> ParseSamplingStrategy(std::string_view name);

struct SamplingConfig {
  SamplingStrategy strategy = SamplingStrategy::kNone;
  double ratio = 1.0;     // uniform, method
  std::size_t size = 0;   // fixed
  double width = 0.10;    // fsci
  double alpha = 0.05;    // fsci
  std::uint64_t seed = 1;
};

struct FuzzConfig {
  double budget_s = 10000.0;
  std::uint64_t max_execs = UINT64_MAX;
  std::uint64_t seed = 1;
  std::chrono::milliseconds exec_timeout{1000};
  std::string compiler = "cc";
  // Optional file listing the mutant ids to fuzz, one per line.
  std::optional<std::filesystem::path> kill_list;
  bool keep_going = false;
};

// Loaded from a line-oriented `key = value` file; `#` starts a comment.
// Paths are relative to the workspace, which is relative to the file.
//
//   workspace        project root (default: the config file's directory)
//   sources          comma-separated C files to mutate          (required)
//   tests            test list file, `{binary}` marks the program (required)
//   tests.timeout_s  per test run (10)
//   build.cmd        shell command, `{level}` becomes O0, O2, ...  (required)
//   build.artifact   built program, relative to the workspace    (required)
//   build.levels     comma-separated (O0,O1,O2,O3,Ofast,Os)
//   build.timeout_s  (300)
//   sampling.strategy  none | uniform | method | fixed | fsci (none)
//   sampling.ratio, sampling.n, sampling.width (0.10), sampling.alpha (0.05),
//   sampling.seed
//   fuzz.budget_s (10000), fuzz.max_execs, fuzz.seed, fuzz.exec_timeout_ms
//   (1000), fuzz.cc (cc), fuzz.kill_list, fuzz.keep_going (false)
//   workers          parallel fuzzing campaigns (1)
//   report           JSON report path (.mutafuzz/report.json)
struct Config {
  std::filesystem::path workspace;
  std::vector<std::string> sources;
  std::filesystem::path tests;
  std::chrono::seconds test_timeout{10};
  buildctl::BuildConfig build;
  SamplingConfig sampling;
  FuzzConfig fuzz;
  unsigned workers = 1;
  std::filesystem::path report;
};

// Throws MissingKey or BadValue with the key name as the message, and
// IoError when the file or a referenced path does not exist.
Config LoadConfig(const std::filesystem::path& path);
Config ParseConfig(std::string_view text, const std::filesystem::path& base_dir);

}  // namespace mutafuzz::orchestrator

#endif  // MUTAFUZZ_ORCHESTRATOR_CONFIG_H_
