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

#ifndef MUTAFUZZ_PRIORITIZER_PRIORITIZER_H_
#define MUTAFUZZ_PRIORITIZER_PRIORITIZER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mutafuzz/covtrace/covtrace.h"
#include "mutafuzz/mutgen/mutant.h"

namespace mutafuzz::prioritizer {

using CoverageVector = std::vector<std::uint64_t>;

// Tests with a non-zero count at the mutant's statement, in matrix order.
// Throws UnknownStatement if (file, ordinal) is not a matrix column.
std::vector<std::string> CoveringTests(const mutgen::Mutant& mutant,
                                       const covtrace::CoverageMatrix& matrix);

// Exact test for u = c * v with c > 0, in integer arithmetic. Both zero is
// parallel; exactly one zero is not. Throws LengthMismatch.
bool Parallel(const CoverageVector& u, const CoverageVector& v);

// 1 - cos(u, v) in [0, 1]; 0 for both-zero, 1 for exactly one zero, and
// exactly 0 whenever Parallel(u, v). Throws LengthMismatch.
double CosineDistance(const CoverageVector& u, const CoverageVector& v);

// Greedy farthest-first: the most distant pair opens the order, then each
// step takes the test whose minimum distance to those already placed is
// largest. Ties (within 1e-12) go to the earlier test in matrix order.
// Duplicated ids are kept once. Tests not in the
// matrix throw UnknownStatement.
std::vector<std::string> OrderTests(const std::vector<std::string>& tests,
                                    const covtrace::CoverageMatrix& matrix);

// Same, over explicit vectors; returns positions into `vectors`.
std::vector<std::size_t> OrderVectors(const std::vector<CoverageVector>& vectors);

// The rows of `tests` (in the given order) laid end to end.
CoverageVector ConcatenateRows(const covtrace::CoverageMatrix& matrix,
                               const std::vector<std::string>& tests);

// Cosine distance zero between the original's and the mutant's vectors,
// decided exactly.
inline bool LikelyEquivalent(const CoverageVector& original, const CoverageVector& mutant) {
  return Parallel(original, mutant);
}

}  // namespace mutafuzz::prioritizer

#endif  // MUTAFUZZ_PRIORITIZER_PRIORITIZER_H_
