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

#include "mutafuzz/orchestrator/score.h"

namespace mutafuzz::orchestrator {

using mutgen::MutantStatus;

MutationScore ComputeMutationScore(const std::vector<MutantStatus>& statuses) {
  MutationScore result;
  for (MutantStatus status : statuses) {
    switch (status) {
      case MutantStatus::kTceEquivalent:
      case MutantStatus::kTceRedundant:
      case MutantStatus::kLikelyEquivalent:
      case MutantStatus::kCompileFailed:
        break;
      case MutantStatus::kKilledDiff:
      case MutantStatus::kKilledCrash:
        ++result.killed;
        ++result.denominator;
        break;
      default:
        ++result.denominator;
        break;
    }
  }
  if (result.denominator == 0) {
    result.score = 1.0;
    result.warning = "no mutants left after exclusions; score set to 1";
  } else {
    result.score = static_cast<double>(result.killed) / static_cast<double>(result.denominator);
  }
  return result;
}

}  // namespace mutafuzz::orchestrator
