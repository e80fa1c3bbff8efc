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

#include "mutafuzz/covtrace/covtrace.h"

#include <chrono>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/common/runtime_sources.h"
#include "mutafuzz/common/subprocess.h"
#include "mutafuzz/mutgen/mutgen.h"
#include "test_util.h"

namespace mutafuzz::covtrace {
namespace {

namespace fs = std::filesystem;
using std::chrono::seconds;

// Instruments `source` and builds it into dir/prog.
void BuildInstrumented(const fs::path& dir, const std::string& source, const std::string& path,
                       InstrumentMode mode, const std::string& name = "prog") {
  WriteRuntimeFiles(dir);
  cfront::SourceUnit unit = cfront::Parse(source, path);
  InstrumentOptions options;
  options.mode = mode;
  WriteFile(dir / (name + ".c"), Instrument(unit, options));
  auto build = RunShell("cc -O0 -w -o " + name + " " + name + ".c", dir, seconds(60));
  ASSERT_TRUE(build.Succeeded()) << build.output;
}

TEST(CounterFileTest, EncodeLayoutIsBitExact) {
  const std::string bytes = EncodeCounters({1, 0x0102030405060708ULL});
  ASSERT_EQ(bytes.size(), 12u + 16u);
  EXPECT_EQ(bytes.substr(0, 4), "MFCV");
  EXPECT_EQ(bytes.substr(4, 4), std::string("\x01\x00\x00\x00", 4));
  EXPECT_EQ(bytes.substr(8, 4), std::string("\x02\x00\x00\x00", 4));
  EXPECT_EQ(bytes.substr(20, 8), std::string("\x08\x07\x06\x05\x04\x03\x02\x01", 8));
  EXPECT_EQ(DecodeCounters(bytes), (std::vector<std::uint64_t>{1, 0x0102030405060708ULL}));
}

TEST(CounterFileTest, RejectsMalformedFiles) {
  EXPECT_THROW(DecodeCounters("MFCX\x01\x00\x00\x00\x00\x00\x00\x00"), Error);
  std::string truncated = EncodeCounters({1, 2, 3});
  truncated.pop_back();
  EXPECT_THROW(DecodeCounters(truncated), Error);
  try {
    ReadCounterFile("/nonexistent/counter.cov");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCounterFileMissing);
  }
}

TEST(EdgeMapTest, IndexAndCountClasses) {
  EXPECT_EQ(EdgeMap::Index(0, 5), 5u);
  EXPECT_EQ(EdgeMap::Index(3, 5), (6u ^ 5u));
  EXPECT_EQ(EdgeMap::Index(40000, 1), ((80000u ^ 1u) % 65536u));
  const std::vector<std::pair<std::uint64_t, int>> table = {
      {0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {7, 4}, {8, 5}, {15, 5}, {16, 6},
      {31, 6}, {32, 7}, {127, 7}, {128, 8}, {1u << 20, 8}};
  for (auto [count, cls] : table) EXPECT_EQ(EdgeMap::CountClass(count), cls) << count;
  EdgeMap map;
  map.Record(0, 7);
  map.Record(7, 1);
  map.Record(7, 1);
  EXPECT_EQ(map.Fingerprint(), (std::vector<std::uint32_t>{(7u << 4) | 1u, (15u << 4) | 2u}));
  EXPECT_THROW(EdgeMap(std::vector<std::uint64_t>(10)), Error);
}

TEST(InstrumentTest, StatementIndexUnchangedOnCorpus) {
  for (const fs::path& file : testing::CorpusFiles()) {
    const cfront::SourceUnit unit = cfront::Parse(ReadFile(file), file.string());
    for (InstrumentMode mode :
         {InstrumentMode::kStatements, InstrumentMode::kEdges, InstrumentMode::kBoth}) {
      InstrumentOptions options;
      options.mode = mode;
      const std::string text = Instrument(unit, options);
      const cfront::SourceUnit again = cfront::Parse(text, file.string());
      EXPECT_EQ(again.statements.size(), unit.statements.size())
          << file << " " << InstrumentModeName(mode);
      for (std::size_t i = 0; i < unit.statements.size(); ++i) {
        EXPECT_EQ(again.node(again.statements[i]).kind, unit.node(unit.statements[i]).kind);
      }
    }
  }
}

TEST(InstrumentTest, CorpusCompiles) {
  TempDir dir;
  WriteRuntimeFiles(dir.path());
  for (const fs::path& file : testing::CorpusFiles()) {
    const cfront::SourceUnit unit = cfront::Parse(ReadFile(file), file.string());
    InstrumentOptions options;
    options.header_path = (dir.path() / kCoverageHeaderName).string();
    WriteFile(dir.path() / "unit.c", Instrument(unit, options));
    auto run = RunShell("cc -std=c11 -Wall -Werror -Wno-unused-function -c unit.c -o unit.o",
                        dir.path(), seconds(60));
    EXPECT_TRUE(run.Succeeded()) << file << "\n" << run.output;
  }
}

TEST(InstrumentTest, NonBlockBodiesAreWrapped) {
  const cfront::SourceUnit unit =
      cfront::Parse("int f(int a){ if (a) a++; else a--; while (a) a--; return a; }", "w.c");
  InstrumentOptions options;
  options.mode = InstrumentMode::kStatements;
  options.emit_header = false;
  EXPECT_EQ(Instrument(unit, options),
            "int f(int a){ __mf_stmt[0]++; if (a) { __mf_stmt[1]++; a++; } else { "
            "__mf_stmt[2]++; a--; } __mf_stmt[3]++; while (a) { __mf_stmt[4]++; a--; } "
            "__mf_stmt[5]++; return a; }");
}

TEST(InstrumentTest, LoopBodyCountsThree) {
  TempDir dir;
  const std::string source = ReadFile(testing::FixturePath("programs/loop3.c"));
  BuildInstrumented(dir.path(), source, "loop3.c", InstrumentMode::kBoth);
  auto run = RunShell("./prog", dir.path(), seconds(10),
                      {{"MUTAFUZZ_COV_FILE", (dir.path() / "c.cov").string()}});
  EXPECT_TRUE(run.Succeeded());
  // Hand trace: decl, for, body x3, if, (then skipped), return.
  EXPECT_EQ(ReadCounterFile(dir.path() / "c.cov"),
            (std::vector<std::uint64_t>{1, 1, 3, 1, 0, 1}));
}

TEST(InstrumentTest, SingleStatementRunOnce) {
  TempDir dir;
  BuildInstrumented(dir.path(), "int main(void){return 0;}", "one.c",
                    InstrumentMode::kStatements);
  auto run = RunShell("./prog", dir.path(), seconds(10),
                      {{"MUTAFUZZ_COV_FILE", (dir.path() / "c.cov").string()}});
  EXPECT_TRUE(run.Succeeded());
  EXPECT_EQ(ReadCounterFile(dir.path() / "c.cov"), (std::vector<std::uint64_t>{1}));
}

TEST(InstrumentTest, PreservesBehaviour) {
  TempDir dir;
  const std::string source = ReadFile(testing::FixturePath("programs/walk.c"));
  WriteFile(dir.path() / "orig.c", source);
  ASSERT_TRUE(RunShell("cc -O0 -w -o orig orig.c", dir.path(), seconds(60)).Succeeded());
  for (InstrumentMode mode :
       {InstrumentMode::kStatements, InstrumentMode::kEdges, InstrumentMode::kBoth}) {
    BuildInstrumented(dir.path(), source, "walk.c", mode);
    for (const char* args : {"", "0", "1", "7 hello", "60 xyz", "-3"}) {
      auto want = RunShell(std::string("./orig ") + args, dir.path(), seconds(10));
      auto got = RunShell(std::string("./prog ") + args, dir.path(), seconds(10),
                          {{"MUTAFUZZ_COV_FILE", (dir.path() / "c.cov").string()},
                           {"MUTAFUZZ_EDGE_FILE", (dir.path() / "e.cov").string()}});
      EXPECT_EQ(got.output, want.output) << args;
      EXPECT_EQ(got.exit_code, want.exit_code) << args;
      EXPECT_EQ(got.signaled, want.signaled) << args;
    }
  }
}

TEST(InstrumentTest, CountsAreMonotoneInInputLength) {
  TempDir dir;
  const std::string source = ReadFile(testing::FixturePath("programs/walk.c"));
  BuildInstrumented(dir.path(), source, "walk.c", InstrumentMode::kStatements);
  std::vector<std::uint64_t> previous;
  std::string input;
  for (int length = 0; length <= 12; ++length) {
    fs::remove(dir.path() / "c.cov");
    RunShell("./prog 6 '" + input + "'", dir.path(), seconds(10),
             {{"MUTAFUZZ_COV_FILE", (dir.path() / "c.cov").string()}});
    std::vector<std::uint64_t> counts = ReadCounterFile(dir.path() / "c.cov");
    if (!previous.empty()) {
      ASSERT_EQ(counts.size(), previous.size());
      for (std::size_t s = 0; s < counts.size(); ++s) {
        EXPECT_GE(counts[s], previous[s]) << "length=" << length << " s=" << s;
      }
    }
    previous = counts;
    input += static_cast<char>('a' + length);
  }
}

TEST(InstrumentTest, EdgeFingerprintIsDeterministic) {
  TempDir dir;
  const std::string source = ReadFile(testing::FixturePath("programs/walk.c"));
  BuildInstrumented(dir.path(), source, "walk.c", InstrumentMode::kEdges);
  std::vector<std::vector<std::uint32_t>> prints;
  for (const char* args : {"9 q", "9 q", "4 q"}) {
    RunShell(std::string("./prog ") + args, dir.path(), seconds(10),
             {{"MUTAFUZZ_EDGE_FILE", (dir.path() / "e.cov").string()}});
    prints.push_back(ReadEdgeFile(dir.path() / "e.cov").Fingerprint());
  }
  EXPECT_FALSE(prints[0].empty());
  EXPECT_EQ(prints[0], prints[1]);
  EXPECT_NE(prints[0], prints[2]);
}

TEST(InstrumentTest, AbortStillFlushes) {
  TempDir dir;
  const std::string source = ReadFile(testing::FixturePath("programs/walk.c"));
  BuildInstrumented(dir.path(), source, "walk.c", InstrumentMode::kBoth);
  auto run = RunShell("./prog -1", dir.path(), seconds(10),
                      {{"MUTAFUZZ_COV_FILE", (dir.path() / "c.cov").string()}});
  EXPECT_FALSE(run.Succeeded());
  std::vector<std::uint64_t> counts = ReadCounterFile(dir.path() / "c.cov");
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  EXPECT_GT(total, 0u);
}

TEST(InstrumentTest, MutationPatchKeepsOrdinals) {
  const std::string source = ReadFile(testing::FixturePath("programs/loop3.c"));
  const cfront::SourceUnit unit = cfront::Parse(source, "loop3.c");
  // Delete the loop body block.
  std::optional<mutgen::MutationPoint> sdl;
  for (const auto& point : mutgen::EnumeratePoints(unit)) {
    if (point.op == mutgen::Operator::kSDL && unit.Text(point.span)[0] == '{' &&
        unit.Text(point.span).find("counter += i") != std::string_view::npos) {
      sdl = point;
    }
  }
  ASSERT_TRUE(sdl.has_value());
  TempDir dir;
  WriteRuntimeFiles(dir.path());
  InstrumentOptions options;
  WriteFile(dir.path() / "m.c", Instrument(unit, options, cfront::Patch{sdl->span, ";"}));
  ASSERT_TRUE(RunShell("cc -O0 -w -o m m.c", dir.path(), seconds(60)).Succeeded());
  auto run = RunShell("./m", dir.path(), seconds(10),
                      {{"MUTAFUZZ_COV_FILE", (dir.path() / "c.cov").string()}});
  EXPECT_EQ(run.exit_code, 256 - 3);
  EXPECT_EQ(ReadCounterFile(dir.path() / "c.cov"),
            (std::vector<std::uint64_t>{1, 1, 0, 1, 0, 1}));
}

TEST(InstrumentTest, UnitsWriteSeparateFilesAndAccumulate) {
  TempDir dir;
  WriteRuntimeFiles(dir.path());
  const cfront::SourceUnit lib =
      cfront::Parse("int twice(int x) { int y = x; y += x; return y; }\n", "lib.c");
  const cfront::SourceUnit main_unit = cfront::Parse(
      "int twice(int x);\nint main(void) { return twice(2) - 4; }\n", "main.c");
  InstrumentOptions options;
  WriteFile(dir.path() / "main.c", Instrument(main_unit, options));
  options.unit_index = 1;
  WriteFile(dir.path() / "lib.c", Instrument(lib, options));
  ASSERT_TRUE(RunShell("cc -O0 -o prog main.c lib.c", dir.path(), seconds(60)).Succeeded());

  const std::string tests = "one\t./prog\n# comment\n\ntwo\t./prog && ./prog\nslow\tsleep 5\n";
  CoverageLayout layout{{"main.c", "lib.c"}, {1, 3}};
  CollectOptions collect;
  collect.binary = dir.path() / "prog";
  collect.timeout = std::chrono::milliseconds(500);
  CollectResult result = Collect(ParseTestList(tests), layout, collect);
  ASSERT_EQ(result.matrix.tests, (std::vector<std::string>{"one", "two", "slow"}));
  ASSERT_EQ(result.matrix.statements.size(), 4u);
  EXPECT_EQ(result.matrix.statements[1], (StatementKey{"lib.c", 0}));
  EXPECT_EQ(result.matrix.counts[0], (std::vector<std::uint64_t>{1, 1, 1, 1}));
  EXPECT_EQ(result.matrix.counts[1], (std::vector<std::uint64_t>{2, 2, 2, 2}));
  EXPECT_EQ(result.matrix.counts[2], (std::vector<std::uint64_t>{0, 0, 0, 0}));
  EXPECT_EQ(result.timed_out, (std::vector<std::string>{"slow"}));
  EXPECT_TRUE(result.runs[0].passed);
  EXPECT_EQ(result.matrix.CoveringTests(0), (std::vector<std::size_t>{0, 1}));

  const CoverageMatrix parsed = ParseMatrix(FormatMatrix(result.matrix));
  EXPECT_EQ(parsed.tests, result.matrix.tests);
  EXPECT_EQ(parsed.statements, result.matrix.statements);
  EXPECT_EQ(parsed.counts, result.matrix.counts);

  try {
    Collect(ParseTestList("true\n"), layout, collect);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCounterFileMissing);
  }
}

TEST(TestListTest, IdsAndComments) {
  auto tests = ParseTestList("a\t./x 1\n\n# c\n./y\n");
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[0].id, "a");
  EXPECT_EQ(tests[0].command, "./x 1");
  EXPECT_EQ(tests[1].id, "t4");
  EXPECT_EQ(tests[1].command, "./y");
}

}  // namespace
}  // namespace mutafuzz::covtrace
