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

#ifndef MUTAFUZZ_MUTGEN_MUTGEN_H_
#define MUTAFUZZ_MUTGEN_MUTGEN_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mutafuzz/cfront/source_unit.h"
#include "mutafuzz/mutgen/mutant.h"

namespace mutafuzz::mutgen {

struct MutationPoint {
  Operator op = Operator::kAOR;
  cfront::ByteSpan span;
  std::size_t statement_ordinal = 0;
  std::string function;
  std::string original;
  std::vector<std::string> replacements;  // in rank order
};

using CoveredSet = std::set<std::size_t>;

// Every applicable (operator, location) pair inside function bodies,
// ordered by span start, operator name, then outer spans first. With
// `covered`, points whose enclosing statement is not listed are dropped.
//
//   AOR  + - * / % to each other member      ROR  < <= > >= == != likewise
//   LCR  && <-> ||                           SDL  statement or block -> ;
//   UOI  (-v) (!v) (~v) on scalar variable reads
//   ABS  abs(e) and -abs(e) as inline conditionals
//   ICR  c -> 0 1 -1 c+1 c-1 -c              LVR  v -> 0.0 -v v+1.0, 'x' -> '\0'
//   AOD LOD ROD BOD SOD   `a op b` -> a, b
//
// Replacements that cannot compile for the operand types are not produced.
std::vector<MutationPoint> EnumeratePoints(
    const cfront::SourceUnit& unit, const std::optional<CoveredSet>& covered = {});

// One mutant per (point, replacement), ids `<stem>-<function>-<OP>-<n>`
// with n counting from 1 per function and operator.
std::vector<Mutant> GenerateMutants(const cfront::SourceUnit& unit,
                                    const std::vector<MutationPoint>& points);

// Source text of the mutant. SpanMismatch when the unit's bytes at the span
// are no longer the recorded original fragment.
std::string Materialize(const cfront::SourceUnit& unit, const Mutant& mutant);

}  // namespace mutafuzz::mutgen

#endif  // MUTAFUZZ_MUTGEN_MUTGEN_H_
