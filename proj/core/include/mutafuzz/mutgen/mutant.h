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

#ifndef MUTAFUZZ_MUTGEN_MUTANT_H_
#define MUTAFUZZ_MUTGEN_MUTANT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/cfront/token.h"

namespace mutafuzz::mutgen {

enum class Operator {
  kABS,
  kAOD,
  kAOR,
  kBOD,
  kICR,
  kLCR,
  kLOD,
  kLVR,
  kROD,
  kROR,
  kSDL,
  kSOD,
  kUOI,
};

std::string_view OperatorName(Operator op);
std::optional<Operator> ParseOperator(std::string_view name);
const std::vector<Operator>& AllOperators();

enum class MutantStatus {
  kGenerated,
  kCompileFailed,
  kTceEquivalent,
  kTceRedundant,
  kSampledOut,
  kLive,
  kKilledDiff,
  kKilledCrash,
  kLikelyEquivalent,
};

std::string_view StatusName(MutantStatus status);
std::optional<MutantStatus> ParseStatus(std::string_view name);
// Statuses only move forward: generated, then a terminal filter status or
// live, then killed-* or likely-equivalent.
bool CanTransition(MutantStatus from, MutantStatus to);
bool IsKilled(MutantStatus status);

struct Mutant {
  std::string id;
  Operator op = Operator::kAOR;
  std::string file;  // source path the mutant applies to
  std::string function;
  std::size_t statement_ordinal = 0;
  cfront::ByteSpan span;
  std::string original_fragment;
  std::string replacement_fragment;
  MutantStatus status = MutantStatus::kGenerated;
  std::string note;  // free-form reason attached by later stages

  // Throws BadValue for a backwards transition.
  void SetStatus(MutantStatus next);
};

// Tab-separated, one mutant per line after a `#` header; fields are
// backslash-escaped.
std::string FormatManifest(const std::vector<Mutant>& mutants);
std::vector<Mutant> ParseManifest(std::string_view text);

}  // namespace mutafuzz::mutgen

#endif  // MUTAFUZZ_MUTGEN_MUTANT_H_
