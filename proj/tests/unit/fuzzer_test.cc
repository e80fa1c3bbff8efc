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

#include "mutafuzz/fuzzer/fuzzer.h"

#include <csignal>
#include <cstring>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/fuzzdrv/fuzzdrv.h"
#include "test_util.h"

namespace mutafuzz::fuzzer {
namespace {

namespace fs = std::filesystem;
using std::chrono::milliseconds;

cfront::SourceUnit ParseFixture(const std::string& name) {
  const fs::path path = testing::FixturePath(name);
  return cfront::Parse(ReadFile(path), path.string());
}

cfront::Patch PatchOf(const cfront::SourceUnit& unit, const std::string& from,
                      const std::string& to) {
  const std::size_t at = unit.text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return {{at, at + from.size()}, to};
}

std::map<std::string, std::string> DirContents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    out[entry.path().filename().string()] = ReadFile(entry.path());
  }
  return out;
}

TEST(MutateTest, BitflipOfZeroByte) {
  std::string bytes(1, '\0');
  FlipBit(bytes, 0);
  EXPECT_EQ(bytes, "\x01");
  FlipBit(bytes, 7);
  EXPECT_EQ(bytes, "\x81");
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const std::string out = MutateInput(std::string(1, '\0'), rng, Stage::kBitflip);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(__builtin_popcount(static_cast<unsigned char>(out[0])), 1);
  }
}

TEST(MutateTest, InterestingWritesAlignedTableValue) {
  Rng rng(9);
  const std::string zeros(16, '\0');
  for (int trial = 0; trial < 500; ++trial) {
    const std::string out = MutateInput(zeros, rng, Stage::kInteresting);
    ASSERT_EQ(out.size(), zeros.size());
    bool explained = out == zeros;  // writing 0 changes nothing
    for (std::size_t width : {1u, 2u, 4u}) {
      for (std::size_t offset = 0; offset + width <= out.size() && !explained; offset += width) {
        if (out.substr(0, offset) != zeros.substr(0, offset)) continue;
        if (out.substr(offset + width) != zeros.substr(offset + width)) continue;
        for (std::int64_t v : InterestingValues()) {
          std::string expected = zeros;
          WriteLe(expected, offset, width, v);
          if (expected == out) explained = true;
        }
      }
    }
    EXPECT_TRUE(explained) << ToHex(out);
  }
}

TEST(MutateTest, SpliceJoinsPrefixAndSuffix) {
  EXPECT_EQ(Splice("abcd", "wxyz", 2), "abyz");
  EXPECT_EQ(Splice("abcd", "wx", 3), "abc");
  EXPECT_EQ(Splice("ab", "wxyz", 3), "abz");
}

TEST(MutateTest, LengthBoundsAndDeterminism) {
  std::mt19937_64 gen(1);
  Rng a(42), b(42);
  for (int i = 0; i < 3000; ++i) {
    std::string input(gen() % 5000, '\0');
    for (char& c : input) c = static_cast<char>(gen());
    const std::string other(gen() % 64, 'q');
    const auto stage = static_cast<Stage>(gen() % 8);
    const std::string x = MutateInput(input, a, stage, other);
    const std::string y = MutateInput(input, b, stage, other);
    ASSERT_EQ(x, y);
    ASSERT_GE(x.size(), 1u) << StageName(stage);
    ASSERT_LE(x.size(), kMaxInputBytes) << StageName(stage);
  }
}

ProcessResult Signaled(int signal) {
  ProcessResult r;
  r.spawned = true;
  r.signaled = true;
  r.signal = signal;
  return r;
}

ProcessResult Exited(int code) {
  ProcessResult r;
  r.spawned = true;
  r.exited = true;
  r.exit_code = code;
  return r;
}

TEST(ClassifyTest, Verdicts) {
  const std::string full_kill =
      "Calling the original function\nCalling the mutated function\n"
      "Comparing result values: \nMutant killed\n";
  const std::string crash_in_mutant =
      "Calling the original function\nCalling the mutated function\n";
  EXPECT_EQ(Classify(Signaled(SIGABRT), full_kill), ExecVerdict::kKilledDiff);
  EXPECT_EQ(Classify(Signaled(SIGSEGV), crash_in_mutant), ExecVerdict::kKilledCrash);
  EXPECT_EQ(Classify(Signaled(SIGFPE), crash_in_mutant), ExecVerdict::kKilledCrash);
  EXPECT_EQ(Classify(Signaled(SIGSEGV), ""), ExecVerdict::kInconclusive);
  EXPECT_EQ(Classify(Signaled(SIGSEGV), "Calling the original function\n"),
            ExecVerdict::kInconclusive);
  EXPECT_EQ(Classify(Exited(0), crash_in_mutant + "Comparing result values: \nMutant alive\n"),
            ExecVerdict::kLive);
  EXPECT_EQ(Classify(Exited(3), crash_in_mutant), ExecVerdict::kInconclusive);
  ProcessResult timeout = Signaled(SIGKILL);
  timeout.timed_out = true;
  EXPECT_EQ(Classify(timeout, crash_in_mutant), ExecVerdict::kTimeout);
}

TEST(ConfirmKillTest, DeterministicStatefulAndTimeout) {
  TempDir dir;
  auto counter = ParseFixture("counter.c");
  auto pure = PrepareDrivers(counter, "pure_twice", std::nullopt, dir.path() / "pure");
  EXPECT_TRUE(ConfirmKill(pure.nondet_driver, "\x05", dir.path()));
  auto stateful = PrepareDrivers(counter, "next_ticket", std::nullopt, dir.path() / "ticket");
  for (const std::string& seed : stateful.seeds) {
    EXPECT_FALSE(ConfirmKill(stateful.nondet_driver, seed, dir.path()));
  }
  auto spin = cfront::Parse("int spin(int x) { volatile int k = 1; while (k) { x++; } return x; }",
                            "spin.c");
  auto spinning = PrepareDrivers(spin, "spin", std::nullopt, dir.path() / "spin");
  EXPECT_FALSE(ConfirmKill(spinning.nondet_driver, "\x01", dir.path(), milliseconds(200)));
}

TEST(CampaignTest, FindsClampBoundaryKill) {
  TempDir dir;
  auto clamp = ParseFixture("clamp.c");
  auto files = PrepareDrivers(clamp, "clamp", PatchOf(clamp, "x < lo", "x <= lo"), dir.path());
  CampaignOptions options;
  options.mutant_id = "clamp-ROR";
  options.driver = files.driver;
  options.nondet_driver = files.nondet_driver;
  options.seeds = files.seeds;
  options.budget.max_seconds = 60;
  options.workdir = dir.path() / "campaign";
  options.rng_seed = 7;
  CampaignResult result = RunCampaign(options);
  ASSERT_EQ(result.verdict, CampaignVerdict::kKilledDiff) << result.executions;
  ASSERT_TRUE(result.killing_input.has_value());
  EXPECT_GT(result.executions, files.seeds.size());
  EXPECT_LT(result.wall_time_s, 60.0);

  // The kill replays.
  Runner runner(files.driver, dir.path(), milliseconds(1000));
  EXPECT_EQ(runner.Run(*result.killing_input).verdict, ExecVerdict::kKilledDiff);
  // The killing input has x == lo > hi (the only distinguishing region).
  std::string padded = *result.killing_input;
  padded.resize(12, '\0');
  std::int32_t v[3];
  std::memcpy(v, padded.data(), 12);
  EXPECT_EQ(v[0], v[1]);
  EXPECT_GT(v[1], v[2]);

  const auto stats = SplitLines(ReadFile(options.workdir / "stats.txt"));
  ASSERT_EQ(stats.size(), 4u);
  EXPECT_EQ(stats[0], "execs=" + std::to_string(result.executions));
  EXPECT_EQ(stats[1], "unique_fingerprints=" + std::to_string(result.unique_fingerprints));
  EXPECT_EQ(stats[2], "verdict=killed-diff");
  EXPECT_EQ(stats[3].rfind("wall_time_s=", 0), 0u);
  EXPECT_EQ(DirContents(options.workdir / "kills").size(), 1u);
  EXPECT_EQ(DirContents(options.workdir / "corpus").size(), result.corpus_size);
}

TEST(CampaignTest, SeedKillStopsImmediately) {
  TempDir dir;
  auto clamp = ParseFixture("clamp.c");
  auto files = PrepareDrivers(clamp, "clamp", PatchOf(clamp, "return x;", "return x + 1;"),
                              dir.path());
  CampaignOptions options;
  options.driver = files.driver;
  options.nondet_driver = files.nondet_driver;
  options.seeds = files.seeds;
  options.workdir = dir.path() / "campaign";
  CampaignResult result = RunCampaign(options);
  EXPECT_EQ(result.verdict, CampaignVerdict::kKilledDiff);
  EXPECT_LE(result.executions, files.seeds.size());
}

TEST(CampaignTest, NotRunCases) {
  TempDir dir;
  auto clamp = ParseFixture("clamp.c");
  auto files = PrepareDrivers(clamp, "clamp", std::nullopt, dir.path());
  CampaignOptions options;
  options.driver = files.driver;
  options.nondet_driver = files.nondet_driver;
  options.seeds = files.seeds;
  options.workdir = dir.path() / "zero";
  options.budget.max_execs = 0;
  CampaignResult result = RunCampaign(options);
  EXPECT_EQ(result.verdict, CampaignVerdict::kNotRun);
  EXPECT_EQ(result.executions, 0u);
  EXPECT_EQ(SplitLines(ReadFile(options.workdir / "stats.txt"))[2], "verdict=not-run");

  options.budget = Budget{};
  options.workdir = dir.path() / "missing";
  options.driver = dir.path() / "no-such-driver";
  result = RunCampaign(options);
  EXPECT_EQ(result.verdict, CampaignVerdict::kNotRun);
  EXPECT_FALSE(result.error.empty());

  options.seeds.clear();
  EXPECT_THROW(RunCampaign(options), Error);
}

TEST(CampaignTest, ReproducibleWithFixedSeed) {
  TempDir dir;
  auto clamp = ParseFixture("clamp.c");
  auto files = PrepareDrivers(clamp, "clamp", std::nullopt, dir.path());
  auto run = [&](const std::string& name) {
    CampaignOptions options;
    options.driver = files.driver;
    options.nondet_driver = files.nondet_driver;
    options.seeds = files.seeds;
    options.workdir = dir.path() / name;
    options.budget.max_execs = 300;
    options.rng_seed = 99;
    return RunCampaign(options);
  };
  CampaignResult a = run("a");
  CampaignResult b = run("b");
  EXPECT_EQ(a.verdict, CampaignVerdict::kLive);
  EXPECT_EQ(a.executions, 300u);
  EXPECT_EQ(a.executions, b.executions);
  EXPECT_EQ(a.unique_fingerprints, b.unique_fingerprints);
  EXPECT_GT(a.corpus_size, 1u);
  EXPECT_EQ(DirContents(dir.path() / "a" / "corpus"), DirContents(dir.path() / "b" / "corpus"));
}

TEST(CampaignTest, StatefulFunctionIsNeverKilled) {
  TempDir dir;
  auto counter = ParseFixture("counter.c");
  auto files = PrepareDrivers(counter, "next_ticket",
                              PatchOf(counter, "base + calls", "base - calls"), dir.path());
  CampaignOptions options;
  options.driver = files.driver;
  options.nondet_driver = files.nondet_driver;
  options.seeds = files.seeds;
  options.workdir = dir.path() / "campaign";
  options.budget.max_seconds = 30;
  CampaignResult result = RunCampaign(options);
  EXPECT_EQ(result.verdict, CampaignVerdict::kLive);
  EXPECT_FALSE(result.killing_input.has_value());
  EXPECT_GE(result.rejected_kills, 1u);
  EXPECT_TRUE(DirContents(options.workdir / "kills").empty());
}

TEST(PrepareDriversTest, RejectsUnsupportedSignature) {
  TempDir dir;
  auto unit = cfront::Parse("int f(void* p) { return p != 0; }", "v.c");
  try {
    PrepareDrivers(unit, "f", std::nullopt, dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedSignature);
  }
}

}  // namespace
}  // namespace mutafuzz::fuzzer
