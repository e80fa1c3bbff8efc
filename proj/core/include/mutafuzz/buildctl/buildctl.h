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

#ifndef MUTAFUZZ_BUILDCTL_BUILDCTL_H_
#define MUTAFUZZ_BUILDCTL_BUILDCTL_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mutafuzz::buildctl {

// Lowercase hex, 128 characters.
std::string Sha512Hex(std::string_view bytes);
std::string Sha512File(const std::filesystem::path& path);

const std::vector<std::string>& DefaultLevels();  // O0 O1 O2 O3 Ofast Os

struct BuildConfig {
  std::string command;   // shell command; `{level}` expands to e.g. "O2"
  std::string artifact;  // relative to the workspace root
  std::vector<std::string> levels = DefaultLevels();
  std::chrono::seconds timeout{300};
};

struct LevelResult {
  bool ok = false;
  std::string digest;      // when ok
  int exit_code = 0;       // when not ok
  std::string diagnostic;  // first diagnostic line when not ok
};

struct BuildOutcome {
  std::string id;  // mutant id or "original"
  std::map<std::string, LevelResult> per_level;

  bool AnyFailed() const;
};

inline constexpr std::string_view kOriginalId = "original";

// The file to swap in for the duration of one build.
struct SourceSwap {
  std::filesystem::path file;  // relative to the workspace root
  std::string contents;
};

// A project directory that mutants are built in by replacing one source
// file in place. Every build runs under an exclusive lock on the
// workspace; the replaced file is restored after the build, on errors, and
// on SIGINT/SIGTERM. A backup under `.mutafuzz/backup` lets the next
// Workspace on the same root repair a file left behind by a killed process.
class Workspace {
 public:
  Workspace(std::filesystem::path root, BuildConfig config);
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const std::filesystem::path& root() const { return root_; }
  const BuildConfig& config() const { return config_; }

  // Builds at one level and hashes the artifact. Throws BuildToolMissing
  // (shell status 127), Timeout, or WorkspaceDirty when the file to swap no
  // longer has the bytes it had when first seen.
  LevelResult Build(const std::string& level, const std::optional<SourceSwap>& swap = {});

  // Build() at every configured level.
  BuildOutcome BuildAllLevels(const std::string& id,
                              const std::optional<SourceSwap>& swap = {});

  // Builds the original twice at the first level and compares digests.
  bool CheckDeterminism();

  // Restores files left swapped by a process that died mid-build. Returns
  // the number of files restored.
  static int RecoverBackups(const std::filesystem::path& root);

 private:
  std::string Baseline(const std::filesystem::path& file);

  std::filesystem::path root_;
  BuildConfig config_;
  std::map<std::filesystem::path, std::string> baselines_;  // file -> sha512
};

struct TcePartition {
  std::set<std::string> equivalent;
  std::vector<std::set<std::string>> redundant_groups;
  std::set<std::string> unique;
  std::set<std::string> compile_failed;

  // Lowest id of the group under NaturalLess.
  static std::string Representative(const std::set<std::string>& group);
  // Ids that continue in the pipeline: unique ones plus one per group.
  std::set<std::string> Survivors() const;
};

// Digit runs compare numerically, so "m-9" < "m-10".
bool NaturalLess(std::string_view a, std::string_view b);

// `outcomes` must contain the original (id "original"). A mutant is
// equivalent when some level's digest equals the original's at that level;
// the rest are grouped by equal digests at any level, closed transitively.
// Mutants with a failed level are reported as compile-failed. Throws
// MissingLevel if an outcome lacks a configured level.
TcePartition Partition(const std::vector<BuildOutcome>& outcomes,
                       const std::vector<std::string>& levels);

// Lines `<id> <level> <sha512hex|FAIL>`.
std::string FormatDigests(const std::vector<BuildOutcome>& outcomes);
std::vector<BuildOutcome> ParseDigests(std::string_view text);

}  // namespace mutafuzz::buildctl

#endif  // MUTAFUZZ_BUILDCTL_BUILDCTL_H_
