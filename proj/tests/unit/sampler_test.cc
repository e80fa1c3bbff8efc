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

#include "mutafuzz/sampler/sampler.h"

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <boost/math/distributions/beta.hpp>

#include "binomial_oracle.h"
#include "gtest/gtest.h"
#include "mutafuzz/common/error.h"

namespace mutafuzz::sampler {
namespace {

std::vector<mutgen::Mutant> Pool(std::size_t n, const std::string& function = "f") {
  std::vector<mutgen::Mutant> out;
  for (std::size_t i = 0; i < n; ++i) {
    mutgen::Mutant m;
    m.id = "m-" + function + "-" + std::to_string(i);
    m.file = "x.c";
    m.function = function;
    out.push_back(m);
  }
  return out;
}

TEST(IncompleteBetaTest, MatchesBoost) {
  for (double a : {0.5, 1.0, 3.0, 17.0}) {
    for (double b : {0.5, 2.0, 9.0, 40.0}) {
      for (double x : {0.001, 0.1, 0.37, 0.5, 0.9, 0.999}) {
        EXPECT_NEAR(RegularizedIncompleteBeta(x, a, b), boost::math::ibeta(a, b, x), 1e-13)
            << a << " " << b << " " << x;
      }
    }
  }
}

TEST(ClopperPearsonTest, Examples) {
  ConfidenceInterval ci = ClopperPearson(0, 10, 0.05);
  EXPECT_EQ(ci.lower, 0.0);
  EXPECT_NEAR(ci.upper, 1.0 - std::pow(0.025, 0.1), 1e-12);
  EXPECT_NEAR(ci.upper, 0.30850, 5e-6);
  ci = ClopperPearson(5, 10, 0.05);
  EXPECT_NEAR(ci.lower, 0.18709, 5e-6);
  EXPECT_NEAR(ci.upper, 0.81291, 5e-6);
  ci = ClopperPearson(0, 0, 0.3);
  EXPECT_EQ(ci.lower, 0.0);
  EXPECT_EQ(ci.upper, 1.0);
}

TEST(ClopperPearsonTest, AgreesWithTailSumOracle) {
  for (double alpha : {0.01, 0.05, 0.10}) {
    for (int n = 1; n <= 50; ++n) {
      for (int k = 0; k <= n; ++k) {
        const auto [lower, upper] = testing::ClopperPearsonOracle(k, n, alpha);
        const ConfidenceInterval ci = ClopperPearson(k, n, alpha);
        ASSERT_NEAR(ci.lower, lower, 1e-9) << k << "/" << n << " a=" << alpha;
        ASSERT_NEAR(ci.upper, upper, 1e-9) << k << "/" << n << " a=" << alpha;
      }
    }
  }
}

TEST(ClopperPearsonTest, AgreesWithBetaBisectionOracle) {
  for (double alpha : {0.01, 0.05, 0.10}) {
    for (int n = 1; n <= 50; ++n) {
      for (int k = 0; k <= n; ++k) {
        const auto [lower, upper] = testing::ClopperPearsonBetaOracle(k, n, alpha);
        const ConfidenceInterval ci = ClopperPearson(k, n, alpha);
        ASSERT_NEAR(ci.lower, lower, 1e-9) << k << "/" << n << " a=" << alpha;
        ASSERT_NEAR(ci.upper, upper, 1e-9) << k << "/" << n << " a=" << alpha;
      }
    }
  }
}

TEST(ClopperPearsonTest, AgreesWithBoostBetaQuantiles) {
  for (int n = 1; n <= 50; ++n) {
    for (int k = 1; k < n; ++k) {
      const ConfidenceInterval ci = ClopperPearson(k, n, 0.05);
      EXPECT_NEAR(ci.lower, boost::math::ibeta_inv(k, n - k + 1, 0.025), 1e-9);
      EXPECT_NEAR(ci.upper, boost::math::ibeta_inv(k + 1, n - k, 0.975), 1e-9);
    }
  }
}

TEST(ClopperPearsonTest, ClosedFormsAtTheEnds) {
  for (int n = 1; n <= 50; ++n) {
    EXPECT_NEAR(ClopperPearson(0, n, 0.05).upper, 1.0 - std::pow(0.025, 1.0 / n), 1e-12);
    EXPECT_NEAR(ClopperPearson(n, n, 0.05).lower, std::pow(0.025, 1.0 / n), 1e-12);
  }
}

TEST(ClopperPearsonTest, SymmetryAndNesting) {
  for (int n = 1; n <= 40; ++n) {
    for (int k = 0; k <= n; ++k) {
      const ConfidenceInterval a = ClopperPearson(k, n, 0.05);
      const ConfidenceInterval b = ClopperPearson(n - k, n, 0.05);
      EXPECT_NEAR(a.lower, 1.0 - b.upper, 1e-9);
      EXPECT_LE(a.lower, a.upper);
      EXPECT_LT(ClopperPearson(2 * k, 2 * n, 0.05).width(), a.width()) << k << "/" << n;
    }
  }
}

TEST(ClopperPearsonTest, DomainErrors) {
  EXPECT_THROW(ClopperPearson(3, 2, 0.05), Error);
  EXPECT_THROW(ClopperPearson(-1, 2, 0.05), Error);
  EXPECT_THROW(ClopperPearson(1, 2, 0.0), Error);
  EXPECT_THROW(ClopperPearson(1, 2, 1.0), Error);
}

TEST(SampleTest, ProportionalUniform) {
  auto picked = Sample(Pool(10), Strategy::Uniform(0.5), 7);
  EXPECT_EQ(picked.size(), 5u);
  EXPECT_EQ(Sample(Pool(10), Strategy::Uniform(0.3), 7).size(), 3u);
  EXPECT_EQ(Sample(Pool(10), Strategy::Uniform(0.31), 7).size(), 4u);
  EXPECT_THROW(Sample(Pool(10), Strategy::Uniform(0.0), 7), Error);
  EXPECT_THROW(Sample(Pool(10), Strategy::Uniform(1.5), 7), Error);
}

TEST(SampleTest, ProportionalMethodRoundsUpPerFunction) {
  auto pool = Pool(4, "f");
  auto g = Pool(3, "g");
  pool.insert(pool.end(), g.begin(), g.end());
  auto picked = Sample(pool, Strategy::Method(0.5), 3);
  std::map<std::string, int> per_function;
  for (const auto& m : picked) per_function[m.function]++;
  EXPECT_EQ(per_function["f"], 2);
  EXPECT_EQ(per_function["g"], 2);
  // A tiny ratio still keeps one mutant of every function.
  picked = Sample(pool, Strategy::Method(0.01), 3);
  EXPECT_EQ(picked.size(), 2u);
}

TEST(SampleTest, FixedSizeClampsAndIsDeterministic) {
  EXPECT_EQ(Sample(Pool(10), Strategy::Fixed(100), 1).size(), 10u);
  auto a = Sample(Pool(50), Strategy::Fixed(20), 99);
  auto b = Sample(Pool(50), Strategy::Fixed(20), 99);
  auto c = Sample(Pool(50), Strategy::Fixed(20), 100);
  ASSERT_EQ(a.size(), 20u);
  std::set<std::string> ids;
  std::vector<std::string> ia, ib, ic;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ids.insert(a[i].id);
    ia.push_back(a[i].id);
    ib.push_back(b[i].id);
    ic.push_back(c[i].id);
  }
  EXPECT_EQ(ids.size(), 20u);
  EXPECT_EQ(ia, ib);
  EXPECT_NE(ia, ic);
}

TEST(SampleTest, SelectionIsUniform) {
  // Each of 10 mutants should be picked about 3/10 of the time.
  std::map<std::string, int> hits;
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    for (const auto& m : Sample(Pool(10), Strategy::Fixed(3), static_cast<std::uint64_t>(s))) {
      hits[m.id]++;
    }
  }
  for (const auto& [id, count] : hits) EXPECT_NEAR(count / double(trials), 0.3, 0.02) << id;
}

TEST(FsciTest, NeverKilledStopsAt36) {
  FsciResult r = Fsci(Pool(100), [](const mutgen::Mutant&) { return false; }, 0.10, 0.05, 1);
  EXPECT_EQ(r.stopped_by, StopReason::kWidthThreshold);
  ASSERT_EQ(r.examined.size(), 36u);
  EXPECT_EQ(r.interval.lower, 0.0);
  EXPECT_NEAR(r.interval.upper, 0.09739, 5e-6);
  EXPECT_GE(r.trace[34].interval.width(), 0.10);
  EXPECT_NEAR(r.trace[34].interval.upper, 0.10003, 5e-6);
}

TEST(FsciTest, AlwaysKilledStopsAt36) {
  FsciResult r = Fsci(Pool(100), [](const mutgen::Mutant&) { return true; }, 0.10, 0.05, 1);
  ASSERT_EQ(r.examined.size(), 36u);
  EXPECT_NEAR(r.interval.lower, 0.90261, 5e-6);
  EXPECT_EQ(r.interval.upper, 1.0);
  EXPECT_EQ(r.estimate, 1.0);
}

TEST(FsciTest, SmallPoolIsExhausted) {
  int calls = 0;
  FsciResult r = Fsci(
      Pool(5), [&](const mutgen::Mutant&) { return ++calls % 2 == 1; }, 0.10, 0.05, 4);
  EXPECT_EQ(r.stopped_by, StopReason::kPoolExhausted);
  EXPECT_EQ(r.examined.size(), 5u);
  EXPECT_DOUBLE_EQ(r.estimate, 3.0 / 5.0);
  std::set<std::string> ids;
  for (const auto& [id, killed] : r.examined) ids.insert(id);
  EXPECT_EQ(ids.size(), 5u);
  EXPECT_THROW(Fsci({}, [](const mutgen::Mutant&) { return true; }, 0.1, 0.05, 1), Error);
  EXPECT_THROW(Fsci(Pool(3), [](const mutgen::Mutant&) { return true; }, 1.0, 0.05, 1), Error);
}

TEST(FsciTest, ResultInvariantsAndCoverage) {
  std::mt19937_64 bernoulli(2024);
  const auto pool = Pool(1500);
  for (int tenth = 1; tenth <= 9; ++tenth) {
    const double p = tenth / 10.0;
    int contained = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
      std::bernoulli_distribution draw(p);
      FsciResult r = Fsci(pool, [&](const mutgen::Mutant&) { return draw(bernoulli); }, 0.10,
                          0.05, static_cast<std::uint64_t>(run));
      ASSERT_EQ(r.stopped_by, StopReason::kWidthThreshold);
      ASSERT_LE(r.interval.lower, r.estimate);
      ASSERT_GE(r.interval.upper, r.estimate);
      ASSERT_LT(r.interval.width(), 0.10);
      ASSERT_GE(r.trace[r.trace.size() - 2].interval.width(), 0.10);
      if (r.interval.lower <= p && p <= r.interval.upper) ++contained;
    }
    EXPECT_GE(contained, 186) << "p=" << p;  // 93% of 200
  }
}

TEST(FsciTest, TraceLineFormat) {
  FsciStep step{4, 1, ClopperPearson(1, 4, 0.05)};
  const std::string line = FormatTraceLine(step);
  EXPECT_EQ(line.rfind("step 4 1 0.00", 0), 0u) << line;
}

}  // namespace
}  // namespace mutafuzz::sampler
