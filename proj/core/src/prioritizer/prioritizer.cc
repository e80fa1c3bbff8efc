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

#include <algorithm>
#include <cmath>
#include <limits>

#include "mutafuzz/common/error.h"

namespace mutafuzz::prioritizer {

namespace {

// Distances this close are ties, so mathematically equal distances
// computed along different paths still fall back to matrix order.
constexpr double kTieTolerance = 1e-12;

bool Farther(double a, double b) { return a > b + kTieTolerance; }

void CheckLengths(const CoverageVector& u, const CoverageVector& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kLengthMismatch, "coverage vectors of length " +
                                                std::to_string(u.size()) + " and " +
                                                std::to_string(v.size()));
  }
}

std::size_t RowOf(const covtrace::CoverageMatrix& matrix, const std::string& test) {
  auto it = std::find(matrix.tests.begin(), matrix.tests.end(), test);
  if (it == matrix.tests.end()) {
    throw Error(ErrorCode::kUnknownStatement, "test '" + test + "' is not in the matrix");
  }
  return static_cast<std::size_t>(it - matrix.tests.begin());
}

}  // namespace

std::vector<std::string> CoveringTests(const mutgen::Mutant& mutant,
                                       const covtrace::CoverageMatrix& matrix) {
  auto column = matrix.StatementIndex({mutant.file, mutant.statement_ordinal});
  if (!column) {
    throw Error(ErrorCode::kUnknownStatement,
                mutant.file + ":" + std::to_string(mutant.statement_ordinal));
  }
  std::vector<std::string> out;
  for (std::size_t t : matrix.CoveringTests(*column)) out.push_back(matrix.tests[t]);
  return out;
}

bool Parallel(const CoverageVector& u, const CoverageVector& v) {
  CheckLengths(u, v);
  // Non-negative vectors are positively parallel iff every coordinate pair
  // has the ratio of a pivot where u is non-zero.
  std::size_t pivot = u.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 0) {
      pivot = i;
      break;
    }
  }
  if (pivot == u.size()) {
    return std::all_of(v.begin(), v.end(), [](std::uint64_t x) { return x == 0; });
  }
  if (v[pivot] == 0) return false;
  using u128 = unsigned __int128;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (static_cast<u128>(u[i]) * v[pivot] != static_cast<u128>(v[i]) * u[pivot]) return false;
  }
  return true;
}

double CosineDistance(const CoverageVector& u, const CoverageVector& v) {
  if (Parallel(u, v)) return 0.0;
  long double dot = 0;
  long double uu = 0;
  long double vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const long double a = static_cast<long double>(u[i]);
    const long double b = static_cast<long double>(v[i]);
    dot += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0 || vv == 0) return 1.0;
  const long double d = 1.0L - dot / (std::sqrt(uu) * std::sqrt(vv));
  return static_cast<double>(std::clamp(d, 0.0L, 1.0L));
}

std::vector<std::size_t> OrderVectors(const std::vector<CoverageVector>& vectors) {
  const std::size_t n = vectors.size();
  if (n <= 1) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  std::size_t best_i = 0;
  std::size_t best_j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = CosineDistance(vectors[i], vectors[j]);
      if (Farther(dist[i][j], dist[best_i][best_j])) {
        best_i = i;
        best_j = j;
      }
    }
  }
  std::vector<std::size_t> order = {best_i, best_j};
  std::vector<bool> placed(n, false);
  placed[best_i] = placed[best_j] = true;
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < n; ++k) min_dist[k] = std::min(dist[k][best_i], dist[k][best_j]);
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (placed[k]) continue;
      if (pick == n || Farther(min_dist[k], min_dist[pick])) pick = k;
    }
    placed[pick] = true;
    order.push_back(pick);
    for (std::size_t k = 0; k < n; ++k) min_dist[k] = std::min(min_dist[k], dist[k][pick]);
  }
  return order;
}

std::vector<std::string> OrderTests(const std::vector<std::string>& tests,
                                    const covtrace::CoverageMatrix& matrix) {
  std::vector<std::size_t> rows;
  for (const std::string& test : tests) rows.push_back(RowOf(matrix, test));
  // Tie-breaks follow matrix order regardless of the order given.
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::vector<CoverageVector> vectors;
  for (std::size_t r : rows) vectors.push_back(matrix.counts[r]);
  std::vector<std::string> out;
  for (std::size_t k : OrderVectors(vectors)) out.push_back(matrix.tests[rows[k]]);
  return out;
}

CoverageVector ConcatenateRows(const covtrace::CoverageMatrix& matrix,
                               const std::vector<std::string>& tests) {
  CoverageVector out;
  for (const std::string& test : tests) {
    const auto& row = matrix.counts[RowOf(matrix, test)];
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace mutafuzz::prioritizer
