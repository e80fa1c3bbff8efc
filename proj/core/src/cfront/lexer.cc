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

#include <array>
#include <cctype>
#include <string>

#include "mutafuzz/cfront/token.h"
#include "mutafuzz/common/error.h"

namespace mutafuzz::cfront {
namespace {

constexpr std::array<std::string_view, 36> kKeywords = {
    "auto",     "break",    "case",     "char",   "const",    "continue",
    "default",  "do",       "double",   "else",   "enum",     "extern",
    "float",    "for",      "goto",     "if",     "inline",   "int",
    "long",     "register", "restrict", "return", "short",    "signed",
    "sizeof",   "static",   "struct",   "switch", "typedef",  "union",
    "unsigned", "void",     "volatile", "while",  "_Bool",    "bool",
};

// Longest match first.
constexpr std::array<std::string_view, 48> kPunctuators = {
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "*=",  "/=", "%=", "+=", "-=", "&=", "^=", "|=", "{",  "}",
    "[",   "]",   "(",   ")",  ";",  ",",  ":",  "?",  ".",  "+",  "-",  "*",
    "/",   "%",   "&",   "|",  "^",  "!",  "~",  "<",  ">",  "=",  "#",  "@",
};

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  LexResult Run() {
    LexResult result;
    bool line_start = true;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        line_start = true;
        ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
        continue;
      }
      if (c == '/' && Peek(1) == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '/' && Peek(1) == '*') {
        std::size_t close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          throw SyntaxError(pos_, {"'*/'"}, "end of file");
        }
        pos_ = close + 2;
        continue;
      }
      if (c == '#' && line_start) {
        result.directives.push_back(SkipDirective());
        continue;
      }
      line_start = false;
      result.tokens.push_back(NextToken());
    }
    Token end;
    end.kind = TokenKind::kEnd;
    end.span = {text_.size(), text_.size()};
    result.tokens.push_back(end);
    return result;
  }

 private:
  char Peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  ByteSpan SkipDirective() {
    std::size_t begin = pos_;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '\\' && Peek(1) == '\n') {
        pos_ += 2;
        continue;
      }
      if (text_[pos_] == '\n') break;
      ++pos_;
    }
    return {begin, pos_};
  }

  Token Make(TokenKind kind, std::size_t begin) {
    Token token;
    token.kind = kind;
    token.span = {begin, pos_};
    token.lexeme = std::string(text_.substr(begin, pos_ - begin));
    return token;
  }

  Token NextToken() {
    const std::size_t begin = pos_;
    const char c = text_[pos_];
    if (IsIdentStart(c)) {
      while (pos_ < text_.size() && IsIdentChar(text_[pos_])) ++pos_;
      Token token = Make(TokenKind::kIdentifier, begin);
      if (IsKeyword(token.lexeme)) token.kind = TokenKind::kKeyword;
      return token;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(Peek(1))))) {
      return Number(begin);
    }
    if (c == '\'' || c == '"') return Quoted(begin, c);
    for (std::string_view punct : kPunctuators) {
      if (text_.substr(pos_, punct.size()) == punct) {
        if (punct == "#" || punct == "@") break;
        pos_ += punct.size();
        return Make(TokenKind::kPunctuator, begin);
      }
    }
    throw SyntaxError(begin, {"token"}, std::string(1, c));
  }

  Token Number(std::size_t begin) {
    bool is_float = false;
    if (text_[pos_] == '0' && (Peek(1) == 'x' || Peek(1) == 'X')) {
      pos_ += 2;
      while (pos_ < text_.size() &&
             std::isxdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    } else if (text_[pos_] == '0' && (Peek(1) == 'b' || Peek(1) == 'B')) {
      pos_ += 2;
      while (pos_ < text_.size() && (text_[pos_] == '0' || text_[pos_] == '1')) {
        ++pos_;
      }
    } else {
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      if (pos_ < text_.size() && text_[pos_] == '.') {
        is_float = true;
        ++pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          is_float = true;
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
          }
        } else {
          pos_ = save;
        }
      }
    }
    // Suffixes: u, l, ll, f in any case and order.
    while (pos_ < text_.size()) {
      char s = static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
      if (s == 'u' || s == 'l' || (is_float && s == 'f')) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ < text_.size() && IsIdentChar(text_[pos_])) {
      throw SyntaxError(pos_, {"number suffix"}, std::string(1, text_[pos_]));
    }
    return Make(is_float ? TokenKind::kFloatLiteral : TokenKind::kIntLiteral,
                begin);
  }

  Token Quoted(std::size_t begin, char quote) {
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      if (text_[pos_] == '\n') break;
      if (text_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    if (pos_ >= text_.size() || text_[pos_] != quote) {
      throw SyntaxError(begin, {std::string("closing ") + quote}, "end of line");
    }
    ++pos_;
    return Make(quote == '"' ? TokenKind::kStringLiteral : TokenKind::kCharLiteral,
                begin);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

bool IsKeyword(std::string_view word) {
  for (std::string_view keyword : kKeywords) {
    if (keyword == word) return true;
  }
  return false;
}

LexResult Lex(std::string_view text) { return Lexer(text).Run(); }

}  // namespace mutafuzz::cfront
