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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/rng.h"

namespace mutafuzz::sampler {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kTolerance = 1e-12;

// Continued fraction for the incomplete beta (modified Lentz).
double BetaContinuedFraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0) || std::isnan(x)) {
    throw Error(ErrorCode::kDomainError, "incomplete beta needs a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(x, a, b) / a;
  return 1.0 - front * BetaContinuedFraction(1.0 - x, b, a) / b;
}

double BetaQuantile(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kDomainError, "probability outside [0,1]");
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < kMaxIterations && hi - lo > kTolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (RegularizedIncompleteBeta(mid, a, b) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ConfidenceInterval ClopperPearson(std::int64_t k, std::int64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kDomainError, "alpha must lie in (0, 1)");
  }
  if (k < 0 || n < 0 || k > n) {
    throw Error(ErrorCode::kDomainError,
                "need 0 <= k <= n, got k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
  ConfidenceInterval ci;
  ci.alpha = alpha;
  if (n == 0) return ci;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  if (k == 0) {
    ci.lower = 0.0;
  } else if (k == n) {
    ci.lower = std::pow(alpha / 2.0, 1.0 / nd);
  } else {
    ci.lower = BetaQuantile(alpha / 2.0, kd, nd - kd + 1.0);
  }
  if (k == n) {
    ci.upper = 1.0;
  } else if (k == 0) {
    ci.upper = 1.0 - std::pow(alpha / 2.0, 1.0 / nd);
  } else {
    ci.upper = BetaQuantile(1.0 - alpha / 2.0, kd + 1.0, nd - kd);
  }
  return ci;
}

std::size_t CeilShare(double ratio, std::size_t count) {
  const double exact = ratio * static_cast<double>(count);
  return std::min(count, static_cast<std::size_t>(std::ceil(exact - 1e-9)));
}

namespace {

// Indices of `take` uniformly chosen elements of [0, count), ascending.
std::vector<std::size_t> ChooseIndices(std::size_t count, std::size_t take, Rng& rng) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.Below(count - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void CheckRatio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kDomainError, "sampling ratio must lie in (0, 1]");
  }
}

}  // namespace

std::vector<mutgen::Mutant> Sample(const std::vector<mutgen::Mutant>& mutants,
                                   const Strategy& strategy, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  switch (strategy.kind) {
    case StrategyKind::kProportionalUniform:
      CheckRatio(strategy.ratio);
      chosen = ChooseIndices(mutants.size(), CeilShare(strategy.ratio, mutants.size()), rng);
      break;
    case StrategyKind::kFixedSize:
      chosen = ChooseIndices(mutants.size(), std::min(strategy.size, mutants.size()), rng);
      break;
    case StrategyKind::kProportionalMethod: {
      CheckRatio(strategy.ratio);
      std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
      for (std::size_t i = 0; i < mutants.size(); ++i) {
        groups[{mutants[i].file, mutants[i].function}].push_back(i);
      }
      for (const auto& [key, members] : groups) {
        for (std::size_t j :
             ChooseIndices(members.size(), CeilShare(strategy.ratio, members.size()), rng)) {
          chosen.push_back(members[j]);
        }
      }
      std::sort(chosen.begin(), chosen.end());
      break;
    }
  }
  std::vector<mutgen::Mutant> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(mutants[i]);
  return out;
}

std::string_view StopReasonName(StopReason reason) {
  return reason == StopReason::kWidthThreshold ? "width-threshold" : "pool-exhausted";
}

std::string FormatTraceLine(const FsciStep& step) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "step %zu %zu %.9f %.9f %.9f", step.examined, step.kills,
                step.interval.lower, step.interval.upper, step.interval.width());
  return buf;
}

FsciResult Fsci(const std::vector<mutgen::Mutant>& pool, const Executor& execute,
                double threshold_w, double alpha, std::uint64_t seed) {
  if (pool.empty()) throw Error(ErrorCode::kDomainError, "empty mutant pool");
  if (!(threshold_w > 0.0 && threshold_w < 1.0)) {
    throw Error(ErrorCode::kDomainError, "width threshold must lie in (0, 1)");
  }
  FsciResult result;
  result.threshold_w = threshold_w;
  result.alpha = alpha;
  result.interval = ClopperPearson(0, 0, alpha);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::size_t kills = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.Below(order.size() - i));
    std::swap(order[i], order[j]);
    const mutgen::Mutant& mutant = pool[order[i]];
    const bool killed = execute(mutant);
    if (killed) ++kills;
    result.examined.emplace_back(mutant.id, killed);
    const std::size_t n = i + 1;
    result.interval = ClopperPearson(static_cast<std::int64_t>(kills),
                                     static_cast<std::int64_t>(n), alpha);
    result.trace.push_back({n, kills, result.interval});
    if (result.interval.width() < threshold_w) {
      result.stopped_by = StopReason::kWidthThreshold;
      break;
    }
  }
  result.estimate =
      static_cast<double>(kills) / static_cast<double>(result.examined.size());
  return result;
}

}  // namespace mutafuzz::sampler
