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

#ifndef MUTAFUZZ_SAMPLER_SAMPLER_H_
#define MUTAFUZZ_SAMPLER_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/mutgen/mutant.h"

namespace mutafuzz::sampler {

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 1.0;
  double alpha = 0.05;

  double width() const { return upper - lower; }
};

// Regularized incomplete beta I_x(a, b), by continued fraction.
double RegularizedIncompleteBeta(double x, double a, double b);

// Smallest x with I_x(a, b) >= p, by bisection to 1e-12.
double BetaQuantile(double p, double a, double b);

// Exact binomial interval for k successes in n trials at level 1 - alpha.
// n = 0 gives [0, 1]. Throws DomainError unless 0 <= k <= n and
// 0 < alpha < 1.
ConfidenceInterval ClopperPearson(std::int64_t k, std::int64_t n, double alpha);

enum class StrategyKind { kProportionalUniform, kProportionalMethod, kFixedSize };

struct Strategy {
  StrategyKind kind = StrategyKind::kProportionalUniform;
  double ratio = 1.0;   // proportional strategies, in (0, 1]
  std::size_t size = 0; // fixed-size

  static Strategy Uniform(double ratio) { return {StrategyKind::kProportionalUniform, ratio, 0}; }
  static Strategy Method(double ratio) { return {StrategyKind::kProportionalMethod, ratio, 0}; }
  static Strategy Fixed(std::size_t n) { return {StrategyKind::kFixedSize, 1.0, n}; }
};

// ceil(ratio * count), ignoring floating noise below 1e-9 (0.3 * 10 is 3).
std::size_t CeilShare(double ratio, std::size_t count);

// Uniform selection without replacement; the result keeps input order.
// The method strategy samples ceil(ratio * n_f) mutants of every function f
// (keyed by file and function name). Throws DomainError on a ratio outside
// (0, 1].
std::vector<mutgen::Mutant> Sample(const std::vector<mutgen::Mutant>& mutants,
                                   const Strategy& strategy, std::uint64_t seed);

enum class StopReason { kWidthThreshold, kPoolExhausted };
std::string_view StopReasonName(StopReason reason);

struct FsciStep {
  std::size_t examined = 0;
  std::size_t kills = 0;
  ConfidenceInterval interval;
};

struct FsciResult {
  std::vector<std::pair<std::string, bool>> examined;  // (mutant id, killed)
  double estimate = 0.0;
  ConfidenceInterval interval;
  StopReason stopped_by = StopReason::kPoolExhausted;
  double threshold_w = 0.10;
  double alpha = 0.05;
  std::vector<FsciStep> trace;
};

// "step <examined> <kills> <lower> <upper> <width>"
std::string FormatTraceLine(const FsciStep& step);

using Executor = std::function<bool(const mutgen::Mutant&)>;

// Draws mutants uniformly without replacement, executes each and
// recomputes the interval, stopping once its width drops below
// `threshold_w` or the pool runs out. Throws DomainError on an empty pool or
// a threshold outside (0, 1).
FsciResult Fsci(const std::vector<mutgen::Mutant>& pool, const Executor& execute,
                double threshold_w, double alpha, std::uint64_t seed);

}  // namespace mutafuzz::sampler

#endif  // MUTAFUZZ_SAMPLER_SAMPLER_H_
