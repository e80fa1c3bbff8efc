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

#ifndef MUTAFUZZ_COVTRACE_COVTRACE_H_
#define MUTAFUZZ_COVTRACE_COVTRACE_H_

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/cfront/source_unit.h"
#include "mutafuzz/common/subprocess.h"

namespace mutafuzz::covtrace {

enum class InstrumentMode { kStatements, kEdges, kBoth };

std::string_view InstrumentModeName(InstrumentMode mode);
std::optional<InstrumentMode> ParseInstrumentMode(std::string_view name);

struct InstrumentOptions {
  InstrumentMode mode = InstrumentMode::kBoth;
  // Units of one program need distinct indices; unit k writes its
  // statement counters to $MUTAFUZZ_COV_FILE (k = 0) or $MUTAFUZZ_COV_FILE.k.
  int unit_index = 0;
  // Spelling used in the generated #include.
  std::string header_path{"mutafuzz_cov.h"};
  // Mixed into edge ids so two copies of a unit get different ids.
  std::string salt;
  // Emit the #define/#include header. Off for code pasted into a unit that
  // already has it.
  bool emit_header = true;
};

// Inserts `__mf_stmt[k]++;` before indexed statement k and
// `__mf_edge(id);` at the entry of every function, branch and loop body,
// at every case label and after every control statement. Sub-statements
// that are not blocks are wrapped in braces. The result parses to a unit
// with the same statement index.
//
// With `mutation`, the patch is applied to the same text: probes strictly
// inside the patched span are dropped, so statement ordinals keep their
// meaning in the original unit.
std::string Instrument(const cfront::SourceUnit& unit, const InstrumentOptions& options,
                       const std::optional<cfront::Patch>& mutation = {});

// Counter file: "MFCV", u32 version 1, u32 n, n x u64, little endian.
inline constexpr std::uint32_t kCounterVersion = 1;
std::string EncodeCounters(const std::vector<std::uint64_t>& counts);
// Throws FormatError on a bad magic, version or length.
std::vector<std::uint64_t> DecodeCounters(std::string_view bytes);
// Throws CounterFileMissing if the file does not exist.
std::vector<std::uint64_t> ReadCounterFile(const std::filesystem::path& path);
void WriteCounterFile(const std::filesystem::path& path,
                      const std::vector<std::uint64_t>& counts);

class EdgeMap {
 public:
  static constexpr std::size_t kBuckets = 65536;

  EdgeMap() : buckets_(kBuckets, 0) {}
  // Throws LengthMismatch unless `buckets` has kBuckets entries.
  explicit EdgeMap(std::vector<std::uint64_t> buckets);

  static std::size_t Index(std::uint32_t previous, std::uint32_t current) {
    return ((static_cast<std::size_t>(previous) * 2) ^ current) % kBuckets;
  }
  // 0 for a zero count, else 1..8 for 1, 2, 3, 4-7, 8-15, 16-31, 32-127,
  // 128+.
  static int CountClass(std::uint64_t count);

  // Replays a block-id trace the way the probes do, starting from block 0.
  void Record(std::uint32_t previous, std::uint32_t current);

  const std::vector<std::uint64_t>& buckets() const { return buckets_; }
  // (bucket << 4 | class) for every non-zero bucket, ascending.
  std::vector<std::uint32_t> Fingerprint() const;

 private:
  std::vector<std::uint64_t> buckets_;
};

// 64-bit FNV-1a of a fingerprint, for counting distinct behaviours.
std::uint64_t FingerprintHash(const std::vector<std::uint32_t>& fingerprint);

// Edge file written by the probes; throws CounterFileMissing when absent.
EdgeMap ReadEdgeFile(const std::filesystem::path& path);

struct StatementKey {
  std::string file;
  std::size_t ordinal = 0;

  std::string ToString() const;  // "<file>:<ordinal>"
  friend bool operator==(const StatementKey&, const StatementKey&) = default;
  friend auto operator<=>(const StatementKey&, const StatementKey&) = default;
};

struct CoverageMatrix {
  std::vector<std::string> tests;
  std::vector<StatementKey> statements;
  std::vector<std::vector<std::uint64_t>> counts;  // [test][statement]

  std::optional<std::size_t> StatementIndex(const StatementKey& key) const;
  // Tests with a non-zero count for the statement.
  std::vector<std::size_t> CoveringTests(std::size_t statement) const;
};

// Header row "test" + statement keys, then one row per test, all
// tab-separated.
std::string FormatMatrix(const CoverageMatrix& matrix);
// Throws FormatError on ragged rows or non-numeric counts.
CoverageMatrix ParseMatrix(std::string_view text);

struct TestCase {
  std::string id;
  std::string command;  // shell; `{binary}` expands to the binary path
};

// One test per line: `<id><TAB><command>` or a bare command (id "t<line>").
// Blank lines and `#` comments are skipped.
std::vector<TestCase> ParseTestList(std::string_view text);

// Describes which counter files a binary writes.
struct CoverageLayout {
  std::vector<std::string> files;        // unit k -> file name
  std::vector<std::size_t> statements;   // unit k -> statement count
};

struct CollectOptions {
  std::filesystem::path binary;
  std::filesystem::path cwd;  // empty: binary's directory
  std::chrono::milliseconds timeout{10000};
  std::map<std::string, std::string> env;
  // Read a missing counter file as zeros instead of throwing, for runs
  // where the program may die before flushing.
  bool missing_as_zero = false;
};

struct TestRun {
  std::string id;
  ProcessResult process;
  bool passed = false;  // exit status 0 within the timeout
};

struct CollectResult {
  CoverageMatrix matrix;
  std::vector<TestRun> runs;
  std::vector<std::string> timed_out;  // rows kept with what was flushed
};

// Runs the tests in order, one fresh set of counter files each, and builds
// the matrix over the layout's statements. A timed-out test keeps the
// counters flushed on SIGTERM (zeros if none). Throws CounterFileMissing if
// a test that did not time out left no counter file.
CollectResult Collect(const std::vector<TestCase>& tests, const CoverageLayout& layout,
                      const CollectOptions& options);

}  // namespace mutafuzz::covtrace

#endif  // MUTAFUZZ_COVTRACE_COVTRACE_H_
