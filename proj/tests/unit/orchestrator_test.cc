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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/orchestrator/config.h"
#include "mutafuzz/orchestrator/pipeline.h"
#include "mutafuzz/orchestrator/score.h"
#include "score_oracle.h"

namespace mutafuzz::orchestrator {
namespace {

namespace fs = std::filesystem;
using mutgen::MutantStatus;

class ConfigTest : public ::testing::Test {
 protected:
  void SetUp() override {
    WriteFile(dir_.path() / "a.c", "int f(int x) { return x; }\n");
    WriteFile(dir_.path() / "tests.txt", "t1\t{binary}\n");
  }

  Config Parse(const std::string& extra) {
    return ParseConfig("sources = a.c\ntests = tests.txt\nbuild.cmd = cc -{level} a.c\n"
                       "build.artifact = a.out\n" + extra,
                       dir_.path());
  }

  static std::string Code(const std::function<void()>& fn, ErrorCode* code) {
    try {
      fn();
    } catch (const Error& e) {
      *code = e.code();
      // what() is "<code>: <key>".
      const std::string what = e.what();
      return what.substr(what.find(": ") + 2);
    }
    return "";
  }

  TempDir dir_;
};

TEST_F(ConfigTest, MinimalConfigHasDefaults) {
  const Config c = Parse("");
  EXPECT_EQ(c.workspace, fs::weakly_canonical(dir_.path()));
  EXPECT_EQ(c.sources, std::vector<std::string>{"a.c"});
  EXPECT_DOUBLE_EQ(c.sampling.width, 0.10);
  EXPECT_DOUBLE_EQ(c.sampling.alpha, 0.05);
  EXPECT_DOUBLE_EQ(c.fuzz.budget_s, 10000.0);
  EXPECT_EQ(c.sampling.strategy, SamplingStrategy::kNone);
  EXPECT_EQ(c.workers, 1u);
  EXPECT_EQ(c.build.levels, buildctl::DefaultLevels());
  EXPECT_EQ(c.report, c.workspace / ".mutafuzz" / "report.json");
}

TEST_F(ConfigTest, MissingBuildCommand) {
  ErrorCode code{};
  const std::string what = Code(
      [&] {
        ParseConfig("sources = a.c\ntests = tests.txt\nbuild.artifact = a.out\n", dir_.path());
      },
      &code);
  EXPECT_EQ(code, ErrorCode::kMissingKey);
  EXPECT_EQ(what, "build.cmd");
}

TEST_F(ConfigTest, ZeroWorkers) {
  ErrorCode code{};
  EXPECT_EQ(Code([&] { Parse("workers = 0\n"); }, &code), "workers");
  EXPECT_EQ(code, ErrorCode::kBadValue);
}

TEST_F(ConfigTest, BadValuesNameTheKey) {
  for (const auto& [line, key] : std::vector<std::pair<std::string, std::string>>{
           {"sampling.strategy = random", "sampling.strategy"},
           {"sampling.width = 1.5", "sampling.width"},
           {"sampling.alpha = 0", "sampling.alpha"},
           {"fuzz.budget_s = soon", "fuzz.budget_s"},
           {"workers = -2", "workers"},
           {"colour = blue", "colour"}}) {
    ErrorCode code{};
    EXPECT_EQ(Code([&] { Parse(line + "\n"); }, &code), key) << line;
    EXPECT_EQ(code, ErrorCode::kBadValue) << line;
  }
}

TEST_F(ConfigTest, PathsMustExist) {
  ErrorCode code{};
  Code([&] { Parse("fuzz.kill_list = nowhere.txt\n"); }, &code);
  EXPECT_EQ(code, ErrorCode::kIoError);
  Code(
      [&] {
        ParseConfig("sources = b.c\ntests = tests.txt\nbuild.cmd = x\nbuild.artifact = y\n",
                    dir_.path());
      },
      &code);
  EXPECT_EQ(code, ErrorCode::kIoError);
}

TEST_F(ConfigTest, FullConfig) {
  const Config c = Parse(
      "# comment\nbuild.levels = O0, O3  # trailing\nsampling.strategy = fsci\n"
      "sampling.width = 0.2\nsampling.seed = 9\nfuzz.budget_s = 60\nfuzz.max_execs = 500\n"
      "fuzz.exec_timeout_ms = 250\nworkers = 4\nreport = out/r.json\n");
  EXPECT_EQ(c.build.levels, (std::vector<std::string>{"O0", "O3"}));
  EXPECT_EQ(c.sampling.strategy, SamplingStrategy::kFsci);
  EXPECT_DOUBLE_EQ(c.sampling.width, 0.2);
  EXPECT_EQ(c.sampling.seed, 9u);
  EXPECT_DOUBLE_EQ(c.fuzz.budget_s, 60.0);
  EXPECT_EQ(c.fuzz.max_execs, 500u);
  EXPECT_EQ(c.fuzz.exec_timeout.count(), 250);
  EXPECT_EQ(c.workers, 4u);
  EXPECT_EQ(c.report, c.workspace / "out" / "r.json");
}

TEST_F(ConfigTest, FixedSamplingNeedsSize) {
  ErrorCode code{};
  EXPECT_EQ(Code([&] { Parse("sampling.strategy = fixed\n"); }, &code), "sampling.n");
  EXPECT_EQ(code, ErrorCode::kMissingKey);
}

std::vector<MutantStatus> Repeat(std::initializer_list<std::pair<MutantStatus, int>> parts) {
  std::vector<MutantStatus> out;
  for (const auto& [status, n] : parts) out.insert(out.end(), n, status);
  return out;
}

TEST(ScoreTest, Example) {
  // 10 mutants: 7 killed, 1 equivalent, 1 redundant, 1 live.
  const MutationScore s = ComputeMutationScore(Repeat({{MutantStatus::kKilledDiff, 5},
                                                       {MutantStatus::kKilledCrash, 2},
                                                       {MutantStatus::kTceEquivalent, 1},
                                                       {MutantStatus::kTceRedundant, 1},
                                                       {MutantStatus::kLive, 1}}));
  EXPECT_DOUBLE_EQ(s.score, 0.875);
  EXPECT_EQ(s.killed, 7u);
  EXPECT_EQ(s.denominator, 8u);
  EXPECT_TRUE(s.warning.empty());
}

TEST(ScoreTest, NoKillsAndAllKilled) {
  EXPECT_DOUBLE_EQ(ComputeMutationScore(Repeat({{MutantStatus::kLive, 4}})).score, 0.0);
  EXPECT_DOUBLE_EQ(ComputeMutationScore(Repeat({{MutantStatus::kKilledDiff, 3},
                                                {MutantStatus::kLikelyEquivalent, 2},
                                                {MutantStatus::kCompileFailed, 1}}))
                       .score,
                   1.0);
}

TEST(ScoreTest, EmptyDenominatorIsOneWithWarning) {
  const MutationScore s = ComputeMutationScore(Repeat({{MutantStatus::kTceEquivalent, 2}}));
  EXPECT_DOUBLE_EQ(s.score, 1.0);
  EXPECT_EQ(s.denominator, 0u);
  EXPECT_FALSE(s.warning.empty());
  EXPECT_FALSE(ComputeMutationScore({}).warning.empty());
}

TEST(ScoreTest, MatchesOracleOnRandomVectors) {
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 100; ++i) {
    const auto statuses = testing::RandomStatuses(rng);
    std::vector<std::string> names;
    for (MutantStatus s : statuses) names.emplace_back(mutgen::StatusName(s));
    const auto expected = testing::OracleScore(names);
    const MutationScore got = ComputeMutationScore(statuses);
    EXPECT_EQ(static_cast<long>(got.killed), expected.killed) << i;
    EXPECT_EQ(static_cast<long>(got.denominator), expected.denominator) << i;
    EXPECT_NEAR(got.score, expected.score, 1e-15) << i;
  }
}

TEST(ScoreTest, AddingKillsNeverLowersTheScore) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto statuses = testing::RandomStatuses(rng);
    double previous = ComputeMutationScore(statuses).score;
    for (MutantStatus& s : statuses) {
      if (s == MutantStatus::kLive || s == MutantStatus::kGenerated ||
          s == MutantStatus::kSampledOut) {
        s = MutantStatus::kKilledCrash;
        const double next = ComputeMutationScore(statuses).score;
        EXPECT_GE(next, previous);
        previous = next;
      }
    }
  }
}

TEST(StageTest, NamesRoundTrip) {
  for (Stage s : AllStages()) EXPECT_EQ(ParseStage(StageName(s)), s);
  EXPECT_FALSE(ParseStage("deploy"));
  EXPECT_EQ(AllStages().front(), Stage::kParse);
  EXPECT_EQ(AllStages().back(), Stage::kReport);
}

TEST(ReportTest, JsonRoundTrip) {
  Report r;
  r.score = ComputeMutationScore(Repeat({{MutantStatus::kKilledDiff, 1}, {MutantStatus::kLive, 2}}));
  r.counts = {{"killed-diff", 1}, {"live", 2}};
  r.total_mutants = 3;
  r.statement_coverage = 0.75;
  r.executed_mutants = 3;
  FsciSummary f;
  f.estimate = 1.0 / 3;
  f.lower = 0.01;
  f.upper = 0.9;
  f.stopped_by = "pool-exhausted";
  f.examined = 3;
  f.kills = 1;
  f.trace = {"step 1 1 0 0.9 0.9"};
  r.fsci = f;
  r.mutants.push_back({"a-f-ROR-1", "a.c", "f", "ROR", 2, "killed-diff", "killed", "t.c"});
  r.mutants.push_back({"a-f-ROR-2", "a.c", "f", "ROR", 2, "live", "survived", ""});
  const std::string json = FormatReportJson(r);
  const Report back = ParseReportJson(json);
  EXPECT_EQ(FormatReportJson(back), json);
  EXPECT_DOUBLE_EQ(back.score.score, 1.0 / 3);
  ASSERT_TRUE(back.fsci);
  EXPECT_EQ(back.fsci->trace, f.trace);
  EXPECT_EQ(back.mutants[0].unit_test, "t.c");
  EXPECT_NE(FormatSummary(r).find("mutation score: 0.3333"), std::string::npos);
  EXPECT_THROW(ParseReportJson("{}"), Error);
}

}  // namespace
}  // namespace mutafuzz::orchestrator
