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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "binomial_oracle.h"
#include "checks.h"
#include "mutafuzz/buildctl/buildctl.h"
#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/fuzzdrv/fuzzdrv.h"
#include "mutafuzz/mutgen/mutgen.h"
#include "mutafuzz/orchestrator/score.h"
#include "mutafuzz/prioritizer/prioritizer.h"
#include "mutafuzz/sampler/sampler.h"
#include "prioritizer_oracle.h"
#include "score_oracle.h"
#include "test_util.h"

namespace mutafuzz::acceptance {
namespace {

std::string Printf(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

std::vector<mutgen::Mutant> Pool(std::size_t n) {
  std::vector<mutgen::Mutant> pool(n);
  for (std::size_t i = 0; i < n; ++i) {
    pool[i].id = "p-f-ROR-" + std::to_string(i + 1);
    pool[i].file = "p.c";
    pool[i].function = "f";
  }
  return pool;
}

}  // namespace

CheckResult CheckClopperPearson() {
  Stopwatch clock;
  double worst = 0.0;
  double worst_closed = 0.0;
  int cases = 0;
  for (double alpha : {0.01, 0.05, 0.10}) {
    for (int n = 1; n <= 50; ++n) {
      const double edge = std::pow(alpha / 2, 1.0 / n);
      for (int k = 0; k <= n; ++k) {
        const sampler::ConfidenceInterval got = sampler::ClopperPearson(k, n, alpha);
        const auto [lower, upper] = testing::ClopperPearsonBetaOracle(k, n, alpha);
        worst = std::max({worst, std::fabs(got.lower - lower), std::fabs(got.upper - upper)});
        ++cases;
        if (k == 0) {
          worst_closed = std::max(
              {worst_closed, std::fabs(got.lower), std::fabs(got.upper - (1.0 - edge))});
        }
        if (k == n) {
          worst_closed =
              std::max({worst_closed, std::fabs(got.lower - edge), std::fabs(got.upper - 1.0)});
        }
      }
    }
  }
  const double seconds = clock.Seconds();
  return {worst <= 1e-9 && worst_closed <= 1e-12 && seconds < 5.0,
          Printf("%d cases, max |err| %.1e (limit 1e-9), closed forms %.1e (limit 1e-12), "
                 "%.2f s (limit 5)",
                 cases, worst, worst_closed, seconds)};
}

CheckResult CheckFsciStopping() {
  Stopwatch clock;
  Failures failures;
  const auto pool = Pool(2000);

  const sampler::FsciResult live =
      sampler::Fsci(pool, [](const mutgen::Mutant&) { return false; }, 0.10, 0.05, 3);
  if (live.examined.size() != 36) {
    failures.Add("always-live stopped at n=" + std::to_string(live.examined.size()));
  }
  if (live.stopped_by != sampler::StopReason::kWidthThreshold) failures.Add("always-live reason");
  if (live.trace.size() != live.examined.size() || live.trace.size() < 2 ||
      live.trace[live.trace.size() - 2].interval.width() < 0.10) {
    failures.Add("interval at n=35 is already narrower than 0.10");
  }
  // The same stopping point straight from the oracle.
  const auto [lo35, hi35] = testing::ClopperPearsonBetaOracle(0, 35, 0.05);
  const auto [lo36, hi36] = testing::ClopperPearsonBetaOracle(0, 36, 0.05);
  if (!(hi35 - lo35 >= 0.10 && hi36 - lo36 < 0.10)) failures.Add("oracle disagrees on n=36");

  std::mt19937_64 coin(2024);
  int worst_contained = 200;
  for (int tenth = 1; tenth <= 9; ++tenth) {
    const double p = tenth / 10.0;
    std::bernoulli_distribution draw(p);
    int contained = 0;
    for (int run = 0; run < 200; ++run) {
      const sampler::FsciResult r =
          sampler::Fsci(pool, [&](const mutgen::Mutant&) { return draw(coin); }, 0.10, 0.05,
                        1000u * tenth + run);
      if (r.interval.lower <= p && p <= r.interval.upper) ++contained;
      if (r.stopped_by == sampler::StopReason::kWidthThreshold && r.interval.width() >= 0.10) {
        failures.Add(Printf("p=%.1f run %d stopped by width at %.4f", p, run,
                            r.interval.width()));
      }
    }
    worst_contained = std::min(worst_contained, contained);
    if (contained < 186) failures.Add(Printf("p=%.1f covered %d/200", p, contained));
  }
  const double seconds = clock.Seconds();
  if (seconds >= 60.0) failures.Add(Printf("took %.1f s", seconds));
  return {failures.empty(),
          Printf("always-live stops at n=%zu; worst coverage %d/200 (need 186); %.2f s%s",
                 live.examined.size(), worst_contained, seconds,
                 failures.empty() ? "" : ("; " + failures.Describe()).c_str())};
}

CheckResult CheckCosineAndOrder() {
  using prioritizer::CoverageVector;
  Failures failures;
  std::mt19937_64 rng(4242);
  auto random_vector = [&](std::size_t len) {
    CoverageVector v(len);
    const bool all_zero = rng() % 10 == 0;
    for (auto& x : v) x = all_zero || rng() % 4 == 0 ? 0 : rng() % 50;
    return v;
  };
  for (int i = 0; i < 1000; ++i) {
    const std::size_t len = 1 + rng() % 8;
    const CoverageVector u = random_vector(len);
    const CoverageVector v = random_vector(len);
    const double d = prioritizer::CosineDistance(u, v);
    if (std::fabs(d - prioritizer::CosineDistance(v, u)) > 1e-12) failures.Add("asymmetric");
    if (d < 0.0 || d > 1.0) failures.Add(Printf("distance %.17g out of range", d));
    if (std::fabs(d - testing::FloatCosineDistance(u, v)) > 1e-9) {
      failures.Add(Printf("case %d: %.17g vs formula %.17g", i, d,
                          testing::FloatCosineDistance(u, v)));
    }
    const std::uint64_t c = 2 + rng() % 1000;
    CoverageVector scaled = u;
    for (auto& x : scaled) x *= c;
    if (!prioritizer::Parallel(u, scaled) || prioritizer::CosineDistance(u, scaled) != 0.0) {
      failures.Add("u and c*u not parallel");
    }
    if (prioritizer::Parallel(scaled, v) != prioritizer::Parallel(u, v) ||
        std::fabs(prioritizer::CosineDistance(scaled, v) - d) > 1e-9) {
      failures.Add("scaling changed the verdict");
    }
  }
  const double example = prioritizer::CosineDistance({1, 0}, {1, 1});
  if (std::fabs(example - (1.0 - 1.0 / std::sqrt(2.0))) > 1e-9) {
    failures.Add(Printf("((1,0),(1,1)) gave %.17g", example));
  }

  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t len = 1 + rng() % 4;
    covtrace::CoverageMatrix matrix;
    for (std::size_t s = 0; s < len; ++s) matrix.statements.push_back({"a.c", s});
    std::vector<CoverageVector> rows;
    for (std::size_t t = 0; t < n; ++t) {
      CoverageVector row(len);
      for (auto& x : row) x = rng() % 4;
      rows.push_back(row);
      matrix.tests.push_back("t" + std::to_string(t));
      matrix.counts.push_back(row);
    }
    const std::vector<std::string> order = prioritizer::OrderTests(matrix.tests, matrix);
    std::vector<std::string> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::string> expected_names = matrix.tests;
    std::sort(expected_names.begin(), expected_names.end());
    if (sorted != expected_names) {
      failures.Add("order is not a permutation");
      continue;
    }
    const auto brute = testing::BruteForceOrder(rows);
    if (!brute) continue;
    ++compared;
    std::vector<std::string> brute_names;
    for (std::size_t index : *brute) brute_names.push_back(matrix.tests[index]);
    if (brute_names != order) failures.Add(Printf("order case %d differs from brute force", i));
  }
  return {failures.empty() && compared >= 900,
          Printf("1000 distance cases, 1000 orders (%d checked by brute force)%s", compared,
                 failures.empty() ? "" : ("; " + failures.Describe()).c_str())};
}

CheckResult CheckTcePartition() {
  Stopwatch clock;
  Failures failures;
  std::mt19937_64 rng(77);
  int fixtures = 0;
  for (; fixtures < 500; ++fixtures) {
    const std::size_t level_count = 1 + rng() % 4;
    std::vector<std::string> levels;
    for (std::size_t l = 0; l < level_count; ++l) levels.push_back("O" + std::to_string(l));
    const std::size_t alphabet = 2 + rng() % 6;
    auto digest = [&](bool may_fail) -> buildctl::LevelResult {
      if (may_fail && rng() % 12 == 0) return {false, "", 1, "error"};
      return {true, buildctl::Sha512Hex("d" + std::to_string(rng() % alphabet)), 0, ""};
    };
    std::vector<buildctl::BuildOutcome> outcomes;
    buildctl::BuildOutcome original{std::string(buildctl::kOriginalId), {}};
    for (const auto& level : levels) original.per_level[level] = digest(false);
    outcomes.push_back(original);
    const std::size_t mutants = rng() % 25;
    for (std::size_t i = 0; i < mutants; ++i) {
      buildctl::BuildOutcome o{"m-" + std::to_string(i + 1), {}};
      for (const auto& level : levels) o.per_level[level] = digest(true);
      outcomes.push_back(o);
    }

    // Brute force: pairwise relation, then transitive closure by Warshall.
    std::set<std::string> failed, equivalent;
    std::vector<const buildctl::BuildOutcome*> rest;
    for (std::size_t i = 1; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      bool any_fail = false;
      bool same = false;
      for (const auto& level : levels) {
        any_fail |= !o.per_level.at(level).ok;
        same |= o.per_level.at(level).ok &&
                o.per_level.at(level).digest == original.per_level.at(level).digest;
      }
      if (any_fail) {
        failed.insert(o.id);
      } else if (same) {
        equivalent.insert(o.id);
      } else {
        rest.push_back(&o);
      }
    }
    const std::size_t r = rest.size();
    std::vector<std::vector<bool>> related(r, std::vector<bool>(r, false));
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        for (const auto& level : levels) {
          if (rest[i]->per_level.at(level).digest == rest[j]->per_level.at(level).digest) {
            related[i][j] = true;
          }
        }
      }
    }
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
          if (related[i][k] && related[k][j]) related[i][j] = true;
        }
      }
    }
    std::set<std::set<std::string>> groups;
    std::set<std::string> unique;
    for (std::size_t i = 0; i < r; ++i) {
      std::set<std::string> cls;
      for (std::size_t j = 0; j < r; ++j) {
        if (related[i][j]) cls.insert(rest[j]->id);
      }
      if (cls.size() == 1) {
        unique.insert(rest[i]->id);
      } else {
        groups.insert(cls);
      }
    }

    const buildctl::TcePartition p = buildctl::Partition(outcomes, levels);
    const std::set<std::set<std::string>> got_groups(p.redundant_groups.begin(),
                                                     p.redundant_groups.end());
    if (p.compile_failed != failed || p.equivalent != equivalent || p.unique != unique ||
        got_groups != groups || got_groups.size() != p.redundant_groups.size()) {
      failures.Add("fixture " + std::to_string(fixtures) + " differs from brute force");
      continue;
    }
    // Disjoint and exhaustive.
    std::multiset<std::string> seen(p.compile_failed.begin(), p.compile_failed.end());
    seen.insert(p.equivalent.begin(), p.equivalent.end());
    seen.insert(p.unique.begin(), p.unique.end());
    for (const auto& g : p.redundant_groups) seen.insert(g.begin(), g.end());
    std::multiset<std::string> all;
    for (std::size_t i = 1; i < outcomes.size(); ++i) all.insert(outcomes[i].id);
    if (seen != all) failures.Add("fixture " + std::to_string(fixtures) + " not a partition");
  }
  const double seconds = clock.Seconds();
  if (seconds >= 1.0) failures.Add(Printf("took %.2f s", seconds));
  return {failures.empty(), Printf("%d random digest fixtures, %.3f s (limit 1)%s", fixtures,
                                   seconds,
                                   failures.empty() ? "" : ("; " + failures.Describe()).c_str())};
}

CheckResult CheckOperatorTables() {
  using Table = std::map<std::string, std::map<std::string, int>>;  // function -> op -> count
  // Worked out by hand from the operator rules for each fixture.
  const std::map<std::string, Table> expected = {
      {"operators.c",
       {{"lt", {{"ROR", 5}, {"ROD", 2}, {"UOI", 6}, {"ABS", 4}, {"SDL", 1}}},
        {"add", {{"AOR", 4}, {"AOD", 2}, {"UOI", 6}, {"ABS", 6}, {"SDL", 1}}}}},
      {"contexts.c",
       {{"both", {{"LCR", 1}, {"LOD", 2}, {"UOI", 6}, {"ABS", 4}, {"SDL", 1}}},
        {"mask", {{"BOD", 2}, {"UOI", 6}, {"ABS", 4}, {"SDL", 1}}},
        {"shl", {{"SOD", 2}, {"UOI", 6}, {"ABS", 4}, {"SDL", 1}}},
        {"twice", {{"ICR", 5}, {"AOR", 4}, {"AOD", 2}, {"UOI", 3}, {"ABS", 4}, {"SDL", 1}}},
        {"half", {{"LVR", 3}, {"AOR", 3}, {"AOD", 2}, {"UOI", 2}, {"ABS", 4}, {"SDL", 1}}}}},
  };
  Failures failures;
  std::size_t total = 0;
  std::set<std::string> operators_seen;
  for (const auto& [name, table] : expected) {
    const cfront::SourceUnit unit =
        cfront::Parse(ReadFile(testing::FixturePath(name)), name);
    const auto mutants = mutgen::GenerateMutants(unit, mutgen::EnumeratePoints(unit));
    Table got;
    for (const mutgen::Mutant& m : mutants) {
      const std::string op(mutgen::OperatorName(m.op));
      ++got[m.function][op];
      operators_seen.insert(op);
      ++total;
      const std::string text = mutgen::Materialize(unit, m);
      const std::size_t tail = unit.text.size() - m.span.end;
      const bool only_span =
          text.compare(0, m.span.begin, unit.text, 0, m.span.begin) == 0 &&
          text.size() >= tail + m.span.begin &&
          text.compare(text.size() - tail, tail, unit.text, m.span.end, tail) == 0 &&
          text.substr(m.span.begin, text.size() - tail - m.span.begin) == m.replacement_fragment &&
          text != unit.text;
      if (!only_span) failures.Add(m.id + " changes text outside its span");
    }
    if (got != table) failures.Add(name + " counts differ from the table");
  }
  // The two named examples on their own.
  const cfront::SourceUnit unit =
      cfront::Parse(ReadFile(testing::FixturePath("operators.c")), "operators.c");
  std::map<std::pair<std::string, std::string>, int> named;
  for (const auto& point : mutgen::EnumeratePoints(unit)) {
    named[{std::string(mutgen::OperatorName(point.op)), point.original}] +=
        static_cast<int>(point.replacements.size());
  }
  const int ror = named[{"ROR", "a < b"}], rod = named[{"ROD", "a < b"}];
  const int aor = named[{"AOR", "a + b"}], aod = named[{"AOD", "a + b"}];
  if (ror != 5 || rod != 2 || aor != 4 || aod != 2) failures.Add("named examples");
  return {failures.empty() && operators_seen.size() == mutgen::AllOperators().size(),
          Printf("a<b -> %d ROR + %d ROD, a+b -> %d AOR + %d AOD; %zu mutants over %zu/%zu "
                 "operators all differ only in their span%s",
                 ror, rod, aor, aod, total, operators_seen.size(),
                 mutgen::AllOperators().size(),
                 failures.empty() ? "" : ("; " + failures.Describe()).c_str())};
}

namespace {

// Byte image of T_POS followed by the int error code, as the C compiler
// lays them out on x86-64.
struct TPosImage {
  std::int32_t x;
  std::int32_t y;
  unsigned char kind;
  double weight;
};
static_assert(sizeof(TPosImage) == 24);

}  // namespace

CheckResult CheckDriverAndSeeds() {
  Failures failures;
  const cfront::SourceUnit unit =
      cfront::Parse(ReadFile(testing::FixturePath("asnlib.c")), "asnlib.c");
  const auto sig = cfront::FindSignature(unit, "T_POS_IsConstraintValid");
  if (!sig) return {false, "signature not found"};
  const std::string driver = fuzzdrv::GenerateDriver(*sig, "/* prelude */\n");
  const std::vector<std::string> order = {
      "load_file(argv[1]);",
      "get_value(&origin_pVal, sizeof(origin_pVal), 0);",
      "get_value(&origin_pErrCode, sizeof(origin_pErrCode), 0);",
      "log(\"Calling the original function\");",
      "origin_return = T_POS_IsConstraintValid(&origin_pVal, &origin_pErrCode);",
      "seek_data_index(0);",
      "get_value(&mut_pVal, sizeof(mut_pVal), 0);",
      "get_value(&mut_pErrCode, sizeof(mut_pErrCode), 0);",
      "log(\"Calling the mutated function\");",
      "mut_return = mut_T_POS_IsConstraintValid(&mut_pVal, &mut_pErrCode);",
      "log(\"Comparing result values: \");",
      "compare_value(&origin_pVal, &mut_pVal, sizeof(origin_pVal));",
      "compare_value(&origin_pErrCode, &mut_pErrCode, sizeof(origin_pErrCode));",
      "compare_value(&origin_return, &mut_return, sizeof(origin_return));",
      "log(\"Mutant killed\");",
      "safe_abort();",
      "log(\"Mutant alive\");",
  };
  std::size_t at = 0;
  for (const std::string& piece : order) {
    const std::size_t found = driver.find(piece, at);
    if (found == std::string::npos) {
      failures.Add("driver lacks or misorders: " + piece);
      break;
    }
    at = found + piece.size();
  }

  const fuzzdrv::InputLayout layout = fuzzdrv::ComputeLayout(*sig);
  const std::vector<std::string> seeds = fuzzdrv::GenerateSeeds(layout);
  if (seeds.size() > 3) failures.Add(std::to_string(seeds.size()) + " seed files");
  std::set<std::int32_t> xs, ys, errs;
  std::set<unsigned> kinds;
  std::set<double> weights;
  for (const std::string& seed : seeds) {
    if (seed.size() != 28) {
      failures.Add("seed size " + std::to_string(seed.size()));
      continue;
    }
    TPosImage image;
    std::int32_t err;
    std::memcpy(&image, seed.data(), sizeof(image));
    std::memcpy(&err, seed.data() + 24, 4);
    xs.insert(image.x);
    ys.insert(image.y);
    kinds.insert(image.kind);
    weights.insert(image.weight);
    errs.insert(err);
  }
  const std::set<std::int32_t> ints = {0, -100, 100};
  if (xs != ints || ys != ints || errs != ints ||
      kinds != std::set<unsigned>{0, 0x80, 'a'} ||
      weights != std::set<double>{0.0, -3.5, 3.5}) {
    failures.Add("some parameter misses a seed class");
  }

  std::mt19937_64 rng(5);
  int round_trips = 0;
  for (; round_trips < 500; ++round_trips) {
    const auto x = static_cast<std::int32_t>(rng());
    const auto y = static_cast<std::int32_t>(rng());
    const auto kind = static_cast<unsigned char>(rng());
    const double weight = std::ldexp(static_cast<double>(rng() % 200001) - 100000, -9);
    const auto err = static_cast<std::int32_t>(rng());
    const std::vector<fuzzdrv::Value> values = {
        fuzzdrv::Value::List({fuzzdrv::Value::Int(x), fuzzdrv::Value::Int(y),
                              fuzzdrv::Value::UInt(kind), fuzzdrv::Value::Float(weight)}),
        fuzzdrv::Value::Int(err)};
    const std::string bytes = fuzzdrv::EncodeInput(values, layout);
    TPosImage image;
    std::int32_t err_back = 0;
    if (bytes.size() == 28) {
      std::memcpy(&image, bytes.data(), sizeof(image));
      std::memcpy(&err_back, bytes.data() + 24, 4);
    }
    if (bytes.size() != 28 || image.x != x || image.y != y || image.kind != kind ||
        image.weight != weight || err_back != err ||
        fuzzdrv::DecodeInput(bytes, layout) != values) {
      failures.Add("round trip " + std::to_string(round_trips));
    }
  }
  return {failures.empty(),
          Printf("%zu sentinels/calls in order, %zu seed files cover 3 classes x 5 fields, "
                 "%d encode round trips%s",
                 order.size(), seeds.size(), round_trips,
                 failures.empty() ? "" : ("; " + failures.Describe()).c_str())};
}

CheckResult CheckScore() {
  Failures failures;
  std::mt19937_64 rng(808);
  for (int i = 0; i < 100; ++i) {
    const auto statuses = testing::RandomStatuses(rng);
    std::vector<std::string> names;
    for (auto s : statuses) names.emplace_back(mutgen::StatusName(s));
    const auto expected = testing::OracleScore(names);
    const orchestrator::MutationScore got = orchestrator::ComputeMutationScore(statuses);
    if (static_cast<long>(got.killed) != expected.killed ||
        static_cast<long>(got.denominator) != expected.denominator ||
        std::fabs(got.score - expected.score) > 1e-15) {
      failures.Add("vector " + std::to_string(i));
    }
  }
  return {failures.empty(),
          Printf("100 random status vectors agree with the direct count%s",
                 failures.empty() ? "" : ("; " + failures.Describe()).c_str())};
}

}  // namespace mutafuzz::acceptance
