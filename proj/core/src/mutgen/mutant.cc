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

#include "mutafuzz/mutgen/mutant.h"

#include <array>
#include <sstream>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"

namespace mutafuzz::mutgen {
namespace {

constexpr std::array<std::pair<Operator, std::string_view>, 13> kOperatorNames = {{
    {Operator::kABS, "ABS"},
    {Operator::kAOD, "AOD"},
    {Operator::kAOR, "AOR"},
    {Operator::kBOD, "BOD"},
    {Operator::kICR, "ICR"},
    {Operator::kLCR, "LCR"},
    {Operator::kLOD, "LOD"},
    {Operator::kLVR, "LVR"},
    {Operator::kROD, "ROD"},
    {Operator::kROR, "ROR"},
    {Operator::kSDL, "SDL"},
    {Operator::kSOD, "SOD"},
    {Operator::kUOI, "UOI"},
}};

constexpr std::array<std::pair<MutantStatus, std::string_view>, 9> kStatusNames = {{
    {MutantStatus::kGenerated, "generated"},
    {MutantStatus::kCompileFailed, "compile-failed"},
    {MutantStatus::kTceEquivalent, "tce-equivalent"},
    {MutantStatus::kTceRedundant, "tce-redundant"},
    {MutantStatus::kSampledOut, "sampled-out"},
    {MutantStatus::kLive, "live"},
    {MutantStatus::kKilledDiff, "killed-diff"},
    {MutantStatus::kKilledCrash, "killed-crash"},
    {MutantStatus::kLikelyEquivalent, "likely-equivalent"},
}};

// 0: generated; 1: filtered or live; 2: outcome of analysing a live mutant.
int Stage(MutantStatus status) {
  switch (status) {
    case MutantStatus::kGenerated: return 0;
    case MutantStatus::kLive: return 1;
    case MutantStatus::kKilledDiff:
    case MutantStatus::kKilledCrash:
    case MutantStatus::kLikelyEquivalent: return 2;
    default: return 3;  // terminal filters
  }
}

}  // namespace

std::string_view OperatorName(Operator op) {
  for (const auto& [value, name] : kOperatorNames) {
    if (value == op) return name;
  }
  return "?";
}

std::optional<Operator> ParseOperator(std::string_view name) {
  for (const auto& [value, text] : kOperatorNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

const std::vector<Operator>& AllOperators() {
  static const std::vector<Operator> all = [] {
    std::vector<Operator> out;
    for (const auto& entry : kOperatorNames) out.push_back(entry.first);
    return out;
  }();
  return all;
}

std::string_view StatusName(MutantStatus status) {
  for (const auto& [value, name] : kStatusNames) {
    if (value == status) return name;
  }
  return "?";
}

std::optional<MutantStatus> ParseStatus(std::string_view name) {
  for (const auto& [value, text] : kStatusNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

bool CanTransition(MutantStatus from, MutantStatus to) {
  if (from == to) return true;
  const int a = Stage(from);
  const int b = Stage(to);
  if (a == 0) return b > 0;
  if (a == 1) return b == 2;
  // A likely-equivalent verdict can still be overturned by a fuzzing kill.
  return from == MutantStatus::kLikelyEquivalent &&
         (to == MutantStatus::kKilledDiff || to == MutantStatus::kKilledCrash);
}

bool IsKilled(MutantStatus status) {
  return status == MutantStatus::kKilledDiff || status == MutantStatus::kKilledCrash;
}

void Mutant::SetStatus(MutantStatus next) {
  if (!CanTransition(status, next)) {
    throw Error(ErrorCode::kBadValue, id + ": " + std::string(StatusName(status)) +
                                          " -> " + std::string(StatusName(next)));
  }
  status = next;
}

std::string FormatManifest(const std::vector<Mutant>& mutants) {
  std::ostringstream out;
  out << "# id\toperator\tfile\tfunction\tstatement\tbegin\tend\tstatus\toriginal"
         "\treplacement\tnote\n";
  for (const Mutant& m : mutants) {
    out << EscapeField(m.id) << '\t' << OperatorName(m.op) << '\t' << EscapeField(m.file)
        << '\t' << EscapeField(m.function) << '\t' << m.statement_ordinal << '\t'
        << m.span.begin << '\t' << m.span.end << '\t' << StatusName(m.status) << '\t'
        << EscapeField(m.original_fragment) << '\t'
        << EscapeField(m.replacement_fragment) << '\t' << EscapeField(m.note) << '\n';
  }
  return out.str();
}

std::vector<Mutant> ParseManifest(std::string_view text) {
  std::vector<Mutant> out;
  std::size_t line_no = 0;
  for (const std::string& line : SplitLines(text)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() < 10) {
      throw Error(ErrorCode::kFormatError,
                  "manifest line " + std::to_string(line_no) + ": too few fields");
    }
    Mutant m;
    m.id = UnescapeField(fields[0]);
    auto op = ParseOperator(fields[1]);
    auto status = ParseStatus(fields[7]);
    if (!op || !status) {
      throw Error(ErrorCode::kFormatError,
                  "manifest line " + std::to_string(line_no) + ": bad operator or status");
    }
    m.op = *op;
    m.file = UnescapeField(fields[2]);
    m.function = UnescapeField(fields[3]);
    try {
      m.statement_ordinal = std::stoul(fields[4]);
      m.span.begin = std::stoul(fields[5]);
      m.span.end = std::stoul(fields[6]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormatError,
                  "manifest line " + std::to_string(line_no) + ": bad number");
    }
    m.status = *status;
    m.original_fragment = UnescapeField(fields[8]);
    m.replacement_fragment = UnescapeField(fields[9]);
    if (fields.size() > 10) m.note = UnescapeField(fields[10]);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace mutafuzz::mutgen
