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

#ifndef MUTAFUZZ_FUZZER_FUZZER_H_
#define MUTAFUZZ_FUZZER_FUZZER_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/rng.h"
#include "mutafuzz/common/subprocess.h"

namespace mutafuzz::fuzzer {

inline constexpr std::size_t kMaxInputBytes = 4096;

enum class Stage {
  kBitflip,
  kByteflip,
  kArith8,
  kArith16,
  kArith32,
  kInteresting,
  kHavoc,
  kSplice,
};

std::string_view StageName(Stage stage);

// {0, 1, -1, 127, -128, 255, 32767, -32768, 2^31-1, -2^31}
const std::vector<std::int64_t>& InterestingValues();

// Primitive edits, exposed for testing.
void FlipBit(std::string& bytes, std::size_t bit);
// Writes the low `width` bytes of `value` little-endian at `offset`,
// growing the buffer with zeros if needed.
void WriteLe(std::string& bytes, std::size_t offset, std::size_t width, std::int64_t value);
std::string Splice(std::string_view head, std::string_view tail, std::size_t cut);

// One mutation of `bytes` by `stage`; `other` is the splice partner.
// Deterministic given the rng state. The result has 1 to kMaxInputBytes
// bytes.
std::string MutateInput(std::string_view bytes, Rng& rng, Stage stage,
                        std::string_view other = {});

enum class ExecVerdict { kKilledDiff, kKilledCrash, kLive, kInconclusive, kTimeout };

std::string_view ExecVerdictName(ExecVerdict verdict);

// Reads a driver execution: an abort with "Mutant killed" logged is a
// difference kill; a signal after "Calling the mutated function" with
// neither verdict logged is a crash kill; a clean exit after "Mutant
// alive" is live; everything else is inconclusive.
ExecVerdict Classify(const ProcessResult& process, std::string_view log);

struct Execution {
  ExecVerdict verdict = ExecVerdict::kInconclusive;
  ProcessResult process;
  std::string log;
  // Fingerprint of the edge map, absent after a timeout or when no edge
  // file was written.
  std::optional<std::vector<std::uint32_t>> fingerprint;
};

// Runs a driver binary on one input inside `workdir`, with log and edge
// files private to that directory.
class Runner {
 public:
  Runner(std::filesystem::path binary, std::filesystem::path workdir,
         std::chrono::milliseconds timeout);

  Execution Run(std::string_view input) const;

 private:
  std::filesystem::path binary_;
  std::filesystem::path workdir_;
  std::chrono::milliseconds timeout_;
};

// True iff the non-determinism driver runs the original twice on `input`
// and exits cleanly. A timeout counts as false.
bool ConfirmKill(const std::filesystem::path& nondet_binary, std::string_view input,
                 const std::filesystem::path& workdir,
                 std::chrono::milliseconds timeout = std::chrono::milliseconds(1000));

struct CorpusEntry {
  std::size_t id = 0;
  std::string bytes;
  std::optional<std::size_t> parent;
  std::vector<std::uint32_t> fingerprint;
  unsigned energy = 1;
};

enum class CampaignVerdict { kKilledDiff, kKilledCrash, kLive, kNotRun };

std::string_view CampaignVerdictName(CampaignVerdict verdict);
std::optional<CampaignVerdict> ParseCampaignVerdict(std::string_view name);

struct Budget {
  double max_seconds = 10000.0;
  std::uint64_t max_execs = UINT64_MAX;
};

struct CampaignOptions {
  std::string mutant_id;
  std::filesystem::path driver;
  std::filesystem::path nondet_driver;
  std::vector<std::string> seeds;
  Budget budget;
  // Receives corpus/, kills/ and stats.txt.
  std::filesystem::path workdir;
  std::uint64_t rng_seed = 1;
  bool keep_going = false;
  std::chrono::milliseconds exec_timeout{1000};
  // A campaign whose candidate kills are rejected this many times by the
  // non-determinism check gives up as live.
  unsigned max_rejected_kills = 3;
};

struct CampaignResult {
  std::string mutant_id;
  CampaignVerdict verdict = CampaignVerdict::kNotRun;
  std::optional<std::string> killing_input;
  std::uint64_t executions = 0;
  std::size_t unique_fingerprints = 0;
  double wall_time_s = 0.0;
  std::size_t corpus_size = 0;
  std::size_t rejected_kills = 0;  // candidate kills failing ConfirmKill
  std::string error;               // why a campaign did not run
};

// Dry-runs the seeds, then mutates corpus entries picked in turn, each for
// `energy` executions; inputs with new (bucket, class) pairs join the
// corpus. An entry holding a bucket no other entry has gets energy 16, a
// bucket shared with one other entry 8, otherwise 4. Stops at the first
// confirmed kill unless keep_going, or when the budget runs out.
CampaignResult RunCampaign(const CampaignOptions& options);

// "key=value" lines: execs, unique_fingerprints, verdict, wall_time_s.
std::string FormatStats(const CampaignResult& result);

// Builds the three sources a campaign needs in `dir`: the edge-instrumented
// subject, the differential driver and the non-determinism driver.
struct DriverBuildOptions {
  std::string compiler = "cc";
  std::vector<std::string> cflags = {"-O0", "-w"};
  std::chrono::milliseconds timeout{120000};
};

struct DriverFiles {
  std::filesystem::path driver;
  std::filesystem::path nondet_driver;
  std::vector<std::string> seeds;
};

// `mutation` is applied to `function` in `subject`; without it the mutant
// equals the original. Throws UnsupportedSignature from layout checks and
// IoError when compilation fails.
DriverFiles PrepareDrivers(const cfront::SourceUnit& subject, std::string_view function,
                           const std::optional<cfront::Patch>& mutation,
                           const std::filesystem::path& dir,
                           const DriverBuildOptions& options = {});

}  // namespace mutafuzz::fuzzer

#endif  // MUTAFUZZ_FUZZER_FUZZER_H_
