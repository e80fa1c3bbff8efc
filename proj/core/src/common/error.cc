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

#include "mutafuzz/common/error.h"

#include <sstream>
#include <utility>

namespace mutafuzz {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::kSpanMismatch: return "SpanMismatch";
    case ErrorCode::kUnresolvedType: return "UnresolvedType";
    case ErrorCode::kBuildToolMissing: return "BuildToolMissing";
    case ErrorCode::kWorkspaceDirty: return "WorkspaceDirty";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kMissingLevel: return "MissingLevel";
    case ErrorCode::kTestTimeout: return "TestTimeout";
    case ErrorCode::kCounterFileMissing: return "CounterFileMissing";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kUnknownStatement: return "UnknownStatement";
    case ErrorCode::kUnsupportedSignature: return "UnsupportedSignature";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kDriverWontRun: return "DriverWontRun";
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kBadValue: return "BadValue";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

namespace {

std::string DescribeSyntaxError(std::size_t offset,
                                const std::vector<std::string>& expected,
                                const std::string& found) {
  std::ostringstream out;
  out << "at byte " << offset << ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
    out << expected[i];
  }
  out << ", found '" << found << "'";
  return out.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& found)
    : Error(ErrorCode::kSyntaxError,
            DescribeSyntaxError(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace mutafuzz
