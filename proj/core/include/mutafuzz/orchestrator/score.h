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

#ifndef MUTAFUZZ_ORCHESTRATOR_SCORE_H_
#define MUTAFUZZ_ORCHESTRATOR_SCORE_H_

#include <cstddef>
#include <string>
#include <vector>

#include "mutafuzz/mutgen/mutant.h"

namespace mutafuzz::orchestrator {

struct MutationScore {
  double score = 1.0;
  std::size_t killed = 0;
  std::size_t denominator = 0;
  std::string warning;  // set when the denominator is zero
};

// killed / (all - tce-equivalent - tce-redundant - likely-equivalent -
// compile-failed) over the given list. Callers wanting the score of a
// sample pass only the sampled mutants.
MutationScore ComputeMutationScore(const std::vector<mutgen::MutantStatus>& statuses);

}  // namespace mutafuzz::orchestrator

#endif  // MUTAFUZZ_ORCHESTRATOR_SCORE_H_
