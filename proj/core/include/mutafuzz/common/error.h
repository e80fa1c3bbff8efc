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

#ifndef MUTAFUZZ_COMMON_ERROR_H_
#define MUTAFUZZ_COMMON_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mutafuzz {

// Every failure surfaced by the library is an Error carrying one of these
// codes. Callers that need to branch on a failure kind inspect code().
enum class ErrorCode {
  kSyntaxError,
  kUnsupportedConstruct,
  kSpanMismatch,
  kUnresolvedType,
  kBuildToolMissing,
  kWorkspaceDirty,
  kTimeout,
  kMissingLevel,
  kTestTimeout,
  kCounterFileMissing,
  kDomainError,
  kLengthMismatch,
  kUnknownStatement,
  kUnsupportedSignature,
  kRangeError,
  kDriverWontRun,
  kMissingKey,
  kBadValue,
  kIoError,
  kFormatError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure at a byte offset, listing what the parser would have
// accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& found);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace mutafuzz

#endif  // MUTAFUZZ_COMMON_ERROR_H_
