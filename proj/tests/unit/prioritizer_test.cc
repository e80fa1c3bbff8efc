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

#include "mutafuzz/prioritizer/prioritizer.h"

#include <cmath>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "mutafuzz/common/error.h"
#include "prioritizer_oracle.h"

namespace mutafuzz::prioritizer {
namespace {

covtrace::CoverageMatrix Matrix(const std::vector<CoverageVector>& rows) {
  covtrace::CoverageMatrix m;
  for (std::size_t s = 0; s < rows.at(0).size(); ++s) m.statements.push_back({"a.c", s});
  for (std::size_t t = 0; t < rows.size(); ++t) {
    m.tests.push_back("t" + std::to_string(t + 1));
    m.counts.push_back(rows[t]);
  }
  return m;
}

mutgen::Mutant MutantAt(std::size_t ordinal) {
  mutgen::Mutant m;
  m.id = "a-f-ROR-1";
  m.file = "a.c";
  m.statement_ordinal = ordinal;
  return m;
}

TEST(CoveringTestsTest, Examples) {
  auto matrix = Matrix({{0, 5, 1}, {3, 0, 1}, {1, 0, 1}});
  EXPECT_EQ(CoveringTests(MutantAt(0), matrix), (std::vector<std::string>{"t2", "t3"}));
  EXPECT_TRUE(CoveringTests(MutantAt(0), Matrix({{0}, {0}})).empty());
  EXPECT_EQ(CoveringTests(MutantAt(2), matrix).size(), 3u);
  try {
    CoveringTests(MutantAt(9), matrix);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownStatement);
  }
}

TEST(CosineTest, Examples) {
  EXPECT_EQ(CosineDistance({3, 4}, {3, 4}), 0.0);
  EXPECT_NEAR(CosineDistance({1, 0}, {0, 1}), 1.0, 1e-15);
  EXPECT_NEAR(CosineDistance({1, 0}, {1, 1}), 1.0 - 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(CosineDistance({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(CosineDistance({0, 0}, {0, 2}), 1.0);
  EXPECT_THROW(CosineDistance({1}, {1, 2}), Error);
}

TEST(CosineTest, RandomizedProperties) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng() % 8;
    CoverageVector u(len), v(len);
    for (std::size_t i = 0; i < len; ++i) {
      u[i] = rng() % 4 == 0 ? 0 : rng() % 50;
      v[i] = rng() % 4 == 0 ? 0 : rng() % 50;
    }
    const double d = CosineDistance(u, v);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_EQ(d, CosineDistance(v, u));
    EXPECT_NEAR(d, testing::FloatCosineDistance(u, v), 1e-12);
    const std::uint64_t c = 1 + rng() % 1000;
    CoverageVector cu = u;
    for (auto& x : cu) x *= c;
    EXPECT_NEAR(CosineDistance(cu, v), d, 1e-12);
    EXPECT_EQ(Parallel(cu, v), Parallel(u, v));
    EXPECT_TRUE(Parallel(u, cu));
    const bool nondegenerate = std::any_of(u.begin(), u.end(), [](auto x) { return x; }) &&
                               std::any_of(v.begin(), v.end(), [](auto x) { return x; });
    if (nondegenerate) {
      EXPECT_EQ(LikelyEquivalent(u, v), testing::FloatCosineDistance(u, v) < 1e-9);
    }
  }
}

TEST(LikelyEquivalentTest, Examples) {
  EXPECT_TRUE(LikelyEquivalent({2, 4}, {1, 2}));
  EXPECT_FALSE(LikelyEquivalent({1, 0}, {1, 1}));
  EXPECT_TRUE(LikelyEquivalent({0, 0}, {0, 0}));
  EXPECT_FALSE(LikelyEquivalent({0, 0}, {0, 1}));
  EXPECT_FALSE(LikelyEquivalent({0, 1}, {0, 0}));
  // Large counts stay exact.
  const std::uint64_t big = (1ULL << 62) + 1;
  EXPECT_TRUE(LikelyEquivalent({big, 2 * big}, {1, 2}));
  EXPECT_FALSE(LikelyEquivalent({big, 2 * big - 1}, {1, 2}));
  EXPECT_TRUE(LikelyEquivalent({big, big}, {3, 3}));
  EXPECT_FALSE(LikelyEquivalent({big, big - 1}, {3, 3}));
  EXPECT_THROW(LikelyEquivalent({1}, {}), Error);
}

TEST(OrderTestsTest, Examples) {
  auto matrix = Matrix({{2, 0}, {2, 0}, {0, 1}});
  EXPECT_EQ(OrderTests({"t1", "t2", "t3"}, matrix),
            (std::vector<std::string>{"t1", "t3", "t2"}));
  EXPECT_EQ(OrderTests({"t2"}, matrix), (std::vector<std::string>{"t2"}));
  auto same = Matrix({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  EXPECT_EQ(OrderTests({"t4", "t2", "t1", "t3"}, same),
            (std::vector<std::string>{"t1", "t2", "t3", "t4"}));
  EXPECT_THROW(OrderTests({"t9"}, matrix), Error);
}

TEST(OrderTestsTest, MatchesBruteForceGreedyDefinition) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t len = 1 + rng() % 4;
    std::vector<CoverageVector> rows(n, CoverageVector(len));
    for (auto& row : rows) {
      for (auto& x : row) x = rng() % 4;
    }
    std::vector<std::size_t> order = OrderVectors(rows);
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(sorted[i], i);
    auto expected = testing::BruteForceOrder(rows);
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(order, *expected) << "trial " << trial;
  }
}

TEST(ConcatenateRowsTest, SelectedTestsInOrder) {
  auto matrix = Matrix({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(ConcatenateRows(matrix, {"t3", "t1"}), (CoverageVector{5, 6, 1, 2}));
}

}  // namespace
}  // namespace mutafuzz::prioritizer
