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

#ifndef MUTAFUZZ_CFRONT_TOKEN_H_
#define MUTAFUZZ_CFRONT_TOKEN_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mutafuzz::cfront {

// Half-open byte range [begin, end) into a source buffer.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool Contains(const ByteSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
  friend auto operator<=>(const ByteSpan&, const ByteSpan&) = default;
};

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kIntLiteral,
  kFloatLiteral,
  kCharLiteral,
  kStringLiteral,
  kPunctuator,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string lexeme;
  ByteSpan span;

  bool Is(std::string_view text) const {
    return (kind == TokenKind::kPunctuator || kind == TokenKind::kKeyword) &&
           lexeme == text;
  }
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by a kEnd token
  std::vector<ByteSpan> directives;  // preprocessor lines, skipped as trivia
};

// Comments, whitespace and `#` directive lines are trivia. Throws
// SyntaxError on a byte that starts no token.
LexResult Lex(std::string_view text);

bool IsKeyword(std::string_view word);

}  // namespace mutafuzz::cfront

#endif  // MUTAFUZZ_CFRONT_TOKEN_H_
