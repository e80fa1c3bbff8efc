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

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/error.h"

namespace mutafuzz::cfront {
namespace {

struct Symbol {
  TypePtr type;
  bool is_typedef = false;
  std::optional<std::int64_t> constant;
};

struct Specifiers {
  bool is_typedef = false;
  bool is_static = false;
  bool is_extern = false;
  bool is_inline = false;
  bool defines_tag = false;
  TypePtr base;
};

struct DeclaratorInfo {
  std::string name;
  std::size_t name_token = 0;
  bool has_name = false;
  TypePtr type;
  std::vector<std::string> param_names;
};

enum class UnresolvedPolicy { kNever, kParameter, kFileScope };

std::optional<std::int64_t> ParseIntLiteral(std::string_view lexeme) {
  std::string digits(lexeme);
  while (!digits.empty() && std::strchr("uUlL", digits.back())) digits.pop_back();
  if (digits.empty()) return std::nullopt;
  int base = 10;
  std::size_t start = 0;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    start = 2;
  } else if (digits.size() > 2 && digits[0] == '0' &&
             (digits[1] == 'b' || digits[1] == 'B')) {
    base = 2;
    start = 2;
  } else if (digits.size() > 1 && digits[0] == '0') {
    base = 8;
    start = 1;
  }
  errno = 0;
  unsigned long long value = std::strtoull(digits.c_str() + start, nullptr, base);
  if (errno != 0) return std::nullopt;
  return static_cast<std::int64_t>(value);
}

std::int64_t CharLiteralValue(std::string_view lexeme) {
  if (lexeme.size() < 3) return 0;
  std::string_view body = lexeme.substr(1, lexeme.size() - 2);
  if (body[0] != '\\') return static_cast<signed char>(body[0]);
  if (body.size() < 2) return 0;
  switch (body[1]) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case '0': case '1': case '2': case '3': case '4': case '5': case '6': case '7':
      return static_cast<signed char>(
          std::strtol(std::string(body.substr(1)).c_str(), nullptr, 8));
    case 'x':
      return static_cast<signed char>(
          std::strtol(std::string(body.substr(2)).c_str(), nullptr, 16));
    case 'a': return '\a';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'v': return '\v';
    default: return body[1];
  }
}

int BinaryPrecedence(std::string_view op) {
  if (op == "*" || op == "/" || op == "%") return 10;
  if (op == "+" || op == "-") return 9;
  if (op == "<<" || op == ">>") return 8;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
  if (op == "==" || op == "!=") return 6;
  if (op == "&") return 5;
  if (op == "^") return 4;
  if (op == "|") return 3;
  if (op == "&&") return 2;
  if (op == "||") return 1;
  return 0;
}

bool IsAssignOp(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" ||
         op == "%=" || op == "&=" || op == "|=" || op == "^=" || op == "<<=" ||
         op == ">>=";
}

TypePtr IntType() {
  static const TypePtr type = MakeScalar(TypeKind::kSignedInt, 4, "int");
  return type;
}
TypePtr UnsignedIntType() {
  static const TypePtr type = MakeScalar(TypeKind::kUnsignedInt, 4, "unsigned int");
  return type;
}
TypePtr LongType() {
  static const TypePtr type = MakeScalar(TypeKind::kSignedInt, 8, "long");
  return type;
}
TypePtr UnsignedLongType() {
  static const TypePtr type =
      MakeScalar(TypeKind::kUnsignedInt, 8, "unsigned long");
  return type;
}
TypePtr DoubleType() {
  static const TypePtr type = MakeScalar(TypeKind::kFloat, 8, "double");
  return type;
}
TypePtr CharType() {
  static const TypePtr type = MakeScalar(TypeKind::kChar, 1, "char");
  return type;
}
TypePtr VoidType() {
  static const TypePtr type = MakeScalar(TypeKind::kVoid, 0, "void");
  return type;
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view path) {
    unit_.path = std::string(path);
    unit_.text = std::string(text);
    LexResult lexed = Lex(unit_.text);
    unit_.tokens = std::move(lexed.tokens);
    unit_.directives = std::move(lexed.directives);
    scopes_.emplace_back();
    InstallBuiltins();
    scopes_.emplace_back();  // file scope
  }

  SourceUnit Run() {
    NodeId root = NewNode(NodeKind::kTranslationUnit, 0);
    while (Cur().kind != TokenKind::kEnd) {
      if (Accept(";")) continue;
      Adopt(root, ParseExternalDeclaration());
    }
    unit_.nodes[0].first_token = 0;
    unit_.nodes[0].end_token = unit_.tokens.size() - 1;
    unit_.nodes[0].span = {0, unit_.text.size()};
    BuildStatementIndex();
    return std::move(unit_);
  }

 private:
  // ---- token helpers ------------------------------------------------------
  const Token& Cur() const { return unit_.tokens[pos_]; }
  const Token& Ahead(std::size_t k) const {
    std::size_t index = std::min(pos_ + k, unit_.tokens.size() - 1);
    return unit_.tokens[index];
  }
  bool At(std::string_view text) const { return Cur().Is(text); }
  bool Accept(std::string_view text) {
    if (!At(text)) return false;
    ++pos_;
    return true;
  }
  void Expect(std::string_view text) {
    if (!Accept(text)) Fail({"'" + std::string(text) + "'"});
  }
  [[noreturn]] void Fail(std::vector<std::string> expected) const {
    const Token& token = Cur();
    throw SyntaxError(token.span.begin, std::move(expected),
                      token.kind == TokenKind::kEnd ? "end of file" : token.lexeme);
  }
  [[noreturn]] void Unsupported(const std::string& what) const {
    throw Error(ErrorCode::kUnsupportedConstruct,
                what + " at byte " + std::to_string(Cur().span.begin));
  }
  std::string ExpectIdentifier() {
    if (Cur().kind != TokenKind::kIdentifier) Fail({"identifier"});
    return unit_.tokens[pos_++].lexeme;
  }

  // ---- node helpers -------------------------------------------------------
  NodeId NewNode(NodeKind kind, std::size_t first_token) {
    Node node;
    node.kind = kind;
    node.first_token = first_token;
    unit_.nodes.push_back(std::move(node));
    return static_cast<NodeId>(unit_.nodes.size() - 1);
  }
  Node& N(NodeId id) { return unit_.nodes[static_cast<std::size_t>(id)]; }
  void Finish(NodeId id) {
    Node& node = N(id);
    node.end_token = pos_;
    node.span.begin = unit_.tokens[node.first_token].span.begin;
    node.span.end = pos_ > node.first_token ? unit_.tokens[pos_ - 1].span.end
                                            : node.span.begin;
  }
  void Adopt(NodeId parent, NodeId child) {
    N(parent).children.push_back(child);
    if (child != kNoNode) N(child).parent = parent;
  }

  // ---- scopes -------------------------------------------------------------
  void InstallBuiltins() {
    auto typedef_of = [&](const char* name, TypeKind kind, std::size_t size,
                          const char* canonical) {
      scopes_[0][name] = {WithTypedefName(MakeScalar(kind, size, canonical), name),
                          true, std::nullopt};
    };
    typedef_of("int8_t", TypeKind::kSignedInt, 1, "signed char");
    typedef_of("int16_t", TypeKind::kSignedInt, 2, "short");
    typedef_of("int32_t", TypeKind::kSignedInt, 4, "int");
    typedef_of("int64_t", TypeKind::kSignedInt, 8, "long");
    typedef_of("uint8_t", TypeKind::kUnsignedInt, 1, "unsigned char");
    typedef_of("uint16_t", TypeKind::kUnsignedInt, 2, "unsigned short");
    typedef_of("uint32_t", TypeKind::kUnsignedInt, 4, "unsigned int");
    typedef_of("uint64_t", TypeKind::kUnsignedInt, 8, "unsigned long");
    typedef_of("size_t", TypeKind::kUnsignedInt, 8, "unsigned long");
    typedef_of("ssize_t", TypeKind::kSignedInt, 8, "long");
    typedef_of("ptrdiff_t", TypeKind::kSignedInt, 8, "long");
    typedef_of("intptr_t", TypeKind::kSignedInt, 8, "long");
    typedef_of("uintptr_t", TypeKind::kUnsignedInt, 8, "unsigned long");
    scopes_[0]["FILE"] = {WithTypedefName(MakeIncompleteRecord("_IO_FILE", false),
                                          "FILE"),
                          true, std::nullopt};
    scopes_[0]["true"] = {IntType(), false, 1};
    scopes_[0]["false"] = {IntType(), false, 0};
    scopes_[0]["NULL"] = {MakePointer(VoidType()), false, 0};
  }
  const Symbol* Lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }
  bool IsTypedefName(const Token& token) const {
    if (token.kind != TokenKind::kIdentifier) return false;
    const Symbol* symbol = Lookup(token.lexeme);
    return symbol != nullptr && symbol->is_typedef;
  }
  void Declare(const std::string& name, Symbol symbol) {
    if (symbol.is_typedef && scopes_.size() == 2) unit_.typedefs[name] = symbol.type;
    scopes_.back()[name] = std::move(symbol);
  }

  bool StartsTypeName(const Token& token) const {
    if (token.kind == TokenKind::kKeyword) {
      static const char* kTypeWords[] = {
          "void",   "char",   "short",    "int",   "long",   "float",
          "double", "signed", "unsigned", "_Bool", "bool",   "struct",
          "union",  "enum",   "const",    "volatile", "restrict"};
      for (const char* word : kTypeWords) {
        if (token.lexeme == word) return true;
      }
      return false;
    }
    return IsTypedefName(token);
  }
  bool StartsDeclaration() const {
    const Token& token = Cur();
    if (token.kind == TokenKind::kKeyword) {
      static const char* kStorage[] = {"typedef", "extern", "static", "auto",
                                       "register", "inline"};
      for (const char* word : kStorage) {
        if (token.lexeme == word) return true;
      }
    }
    if (StartsTypeName(token)) {
      // A typedef name followed by '=' or '(' reads as an expression.
      if (token.kind == TokenKind::kIdentifier &&
          (Ahead(1).Is("=") || Ahead(1).Is("(") || Ahead(1).Is("."))) {
        return false;
      }
      return true;
    }
    return false;
  }

  // ---- declarations -------------------------------------------------------
  Specifiers ParseSpecifiers(UnresolvedPolicy policy, NodeId attach_to) {
    Specifiers spec;
    int n_void = 0, n_char = 0, n_short = 0, n_int = 0, n_long = 0, n_signed = 0,
        n_unsigned = 0, n_float = 0, n_double = 0, n_bool = 0;
    bool is_const = false;
    bool any = false;
    while (true) {
      const Token& token = Cur();
      if (token.kind == TokenKind::kKeyword) {
        const std::string& w = token.lexeme;
        if (w == "typedef") { spec.is_typedef = true; }
        else if (w == "extern") { spec.is_extern = true; }
        else if (w == "static") { spec.is_static = true; }
        else if (w == "inline") { spec.is_inline = true; }
        else if (w == "auto" || w == "register" || w == "volatile" ||
                 w == "restrict") {}
        else if (w == "const") { is_const = true; }
        else if (w == "void") { ++n_void; }
        else if (w == "char") { ++n_char; }
        else if (w == "short") { ++n_short; }
        else if (w == "int") { ++n_int; }
        else if (w == "long") { ++n_long; }
        else if (w == "signed") { ++n_signed; }
        else if (w == "unsigned") { ++n_unsigned; }
        else if (w == "float") { ++n_float; }
        else if (w == "double") { ++n_double; }
        else if (w == "_Bool" || w == "bool") { ++n_bool; }
        else if (w == "struct" || w == "union") {
          if (spec.base) Fail({"declarator"});
          spec.base = ParseRecord(spec.defines_tag, attach_to);
          any = true;
          continue;
        } else if (w == "enum") {
          if (spec.base) Fail({"declarator"});
          spec.base = ParseEnum(spec.defines_tag, attach_to);
          any = true;
          continue;
        } else {
          break;
        }
        any = true;
        ++pos_;
        continue;
      }
      const bool have_keyword_type = n_void + n_char + n_short + n_int + n_long +
                                     n_signed + n_unsigned + n_float + n_double +
                                     n_bool > 0;
      if (token.kind == TokenKind::kIdentifier && !spec.base && !have_keyword_type) {
        if (IsTypedefName(token)) {
          spec.base = Lookup(token.lexeme)->type;
          any = true;
          ++pos_;
          continue;
        }
        if (policy != UnresolvedPolicy::kNever) {
          const Token& next = Ahead(1);
          bool looks_like_type =
              next.kind == TokenKind::kIdentifier || next.Is("*") ||
              (policy == UnresolvedPolicy::kParameter && (next.Is(",") || next.Is(")")));
          if (looks_like_type) {
            spec.base = MakeUnresolved(token.lexeme);
            any = true;
            ++pos_;
            continue;
          }
        }
      }
      break;
    }
    if (!any) Fail({"declaration specifier"});
    if (!spec.base) {
      if (n_void) spec.base = VoidType();
      else if (n_bool) spec.base = MakeScalar(TypeKind::kBool, 1, "_Bool");
      else if (n_float) spec.base = MakeScalar(TypeKind::kFloat, 4, "float");
      else if (n_double) {
        spec.base = n_long ? MakeScalar(TypeKind::kFloat, 16, "long double")
                           : DoubleType();
      } else if (n_char) {
        if (n_unsigned) spec.base = MakeScalar(TypeKind::kChar, 1, "unsigned char", false);
        else if (n_signed) spec.base = MakeScalar(TypeKind::kChar, 1, "signed char");
        else spec.base = CharType();
      } else if (n_short) {
        spec.base = n_unsigned ? MakeScalar(TypeKind::kUnsignedInt, 2, "unsigned short")
                               : MakeScalar(TypeKind::kSignedInt, 2, "short");
      } else if (n_long >= 2) {
        spec.base = n_unsigned
                        ? MakeScalar(TypeKind::kUnsignedInt, 8, "unsigned long long")
                        : MakeScalar(TypeKind::kSignedInt, 8, "long long");
      } else if (n_long == 1) {
        spec.base = n_unsigned ? UnsignedLongType() : LongType();
      } else if (n_unsigned) {
        spec.base = UnsignedIntType();
      } else if (n_int || n_signed) {
        spec.base = IntType();
      } else {
        // Storage class alone: implicit int is not part of the subset.
        Fail({"type specifier"});
      }
    }
    if (is_const) spec.base = WithConst(spec.base);
    return spec;
  }

  TypePtr ParseRecord(bool& defines_tag, NodeId attach_to) {
    const bool is_union = Cur().lexeme == "union";
    ++pos_;
    std::string tag;
    if (Cur().kind == TokenKind::kIdentifier) tag = unit_.tokens[pos_++].lexeme;
    if (!At("{")) {
      if (tag.empty()) Fail({"'{'", "tag"});
      auto found = unit_.tags.find(tag);
      if (found != unit_.tags.end()) return found->second;
      TypePtr incomplete = MakeIncompleteRecord(tag, is_union);
      unit_.tags[tag] = incomplete;
      return incomplete;
    }
    ++pos_;
    defines_tag = true;
    if (!tag.empty() && unit_.tags.count(tag) == 0) {
      unit_.tags[tag] = MakeIncompleteRecord(tag, is_union);
    }
    std::vector<StructMember> members;
    while (!Accept("}")) {
      Specifiers spec = ParseSpecifiers(UnresolvedPolicy::kNever, attach_to);
      if (At(";")) {
        // Anonymous nested record.
        members.push_back({"", spec.base, 0});
        ++pos_;
        continue;
      }
      while (true) {
        DeclaratorInfo info = ParseDeclarator(spec.base, false, attach_to);
        if (At(":")) Unsupported("bit-field");
        if (info.type->kind == TypeKind::kFunction) Unsupported("function member");
        members.push_back({info.name, info.type, 0});
        if (!Accept(",")) break;
      }
      Expect(";");
    }
    TypePtr record = MakeStruct(tag, std::move(members), is_union);
    if (!tag.empty()) unit_.tags[tag] = record;
    return record;
  }

  TypePtr ParseEnum(bool& defines_tag, NodeId attach_to) {
    ++pos_;
    std::string tag;
    if (Cur().kind == TokenKind::kIdentifier) tag = unit_.tokens[pos_++].lexeme;
    if (!At("{")) {
      if (tag.empty()) Fail({"'{'", "tag"});
      auto found = unit_.tags.find("enum " + tag);
      if (found != unit_.tags.end()) return found->second;
      return MakeEnum(tag, {});
    }
    ++pos_;
    defines_tag = true;
    std::vector<Enumerator> values;
    std::int64_t next = 0;
    while (!Accept("}")) {
      std::string name = ExpectIdentifier();
      if (Accept("=")) {
        NodeId expr = ParseConditional();
        MarkConstant(expr);
        if (attach_to != kNoNode) Adopt(attach_to, expr);
        auto value = EvalConst(expr);
        if (!value) Unsupported("non-constant enumerator value");
        next = *value;
      }
      values.push_back({name, next});
      Declare(name, {IntType(), false, next});
      ++next;
      if (!Accept(",")) {
        Expect("}");
        break;
      }
    }
    TypePtr type = MakeEnum(tag, std::move(values));
    if (!tag.empty()) unit_.tags["enum " + tag] = type;
    return type;
  }

  DeclaratorInfo ParseDeclarator(TypePtr base, bool allow_abstract,
                                 NodeId attach_to) {
    DeclaratorInfo info;
    TypePtr type = std::move(base);
    while (Accept("*")) {
      type = MakePointer(type);
      while (At("const") || At("volatile") || At("restrict")) ++pos_;
    }
    if (At("(")) {
      if (Ahead(1).Is("*")) Unsupported("function pointer");
      if (!allow_abstract || Ahead(1).kind == TokenKind::kIdentifier) {
        Unsupported("parenthesized declarator");
      }
    }
    if (Cur().kind == TokenKind::kIdentifier && !IsTypedefName(Cur())) {
      info.name_token = pos_;
      info.name = unit_.tokens[pos_++].lexeme;
      info.has_name = true;
    } else if (!allow_abstract) {
      Fail({"identifier"});
    }
    struct Suffix {
      bool is_array = false;
      std::optional<std::size_t> length;
      std::vector<TypePtr> params;
      std::vector<std::string> names;
      bool variadic = false;
    };
    std::vector<Suffix> suffixes;
    while (true) {
      if (Accept("[")) {
        Suffix suffix;
        suffix.is_array = true;
        if (!At("]")) {
          NodeId size = ParseConditional();
          MarkConstant(size);
          if (attach_to != kNoNode) Adopt(attach_to, size);
          auto value = EvalConst(size);
          if (!value || *value < 0) Unsupported("non-constant array size");
          suffix.length = static_cast<std::size_t>(*value);
        }
        Expect("]");
        suffixes.push_back(std::move(suffix));
      } else if (At("(")) {
        ++pos_;
        Suffix suffix;
        ParseParameters(suffix.params, suffix.names, suffix.variadic, attach_to);
        suffixes.push_back(std::move(suffix));
      } else {
        break;
      }
    }
    for (auto it = suffixes.rbegin(); it != suffixes.rend(); ++it) {
      if (it->is_array) {
        if (type->kind == TypeKind::kFunction) Unsupported("array of functions");
        type = MakeArray(type, it->length.value_or(0));
      } else {
        if (type->kind == TypeKind::kFunction || type->kind == TypeKind::kArray) {
          Unsupported("function returning array or function");
        }
        type = MakeFunction(type, it->params, it->variadic);
      }
    }
    if (!suffixes.empty() && !suffixes.front().is_array) {
      info.param_names = suffixes.front().names;
    }
    info.type = type;
    return info;
  }

  void ParseParameters(std::vector<TypePtr>& params, std::vector<std::string>& names,
                       bool& variadic, NodeId attach_to) {
    if (Accept(")")) return;
    if (At("void") && Ahead(1).Is(")")) {
      pos_ += 2;
      return;
    }
    while (true) {
      if (Accept("...")) {
        variadic = true;
        break;
      }
      Specifiers spec = ParseSpecifiers(UnresolvedPolicy::kParameter, attach_to);
      DeclaratorInfo info = ParseDeclarator(spec.base, true, attach_to);
      TypePtr type = info.type;
      if (type->kind == TypeKind::kFunction) Unsupported("function pointer parameter");
      if (type->kind == TypeKind::kArray && type->array_length == 0) {
        type = MakePointer(type->pointee);
      }
      params.push_back(type);
      names.push_back(info.has_name ? info.name
                                    : "arg" + std::to_string(params.size() - 1));
      if (!Accept(",")) break;
    }
    Expect(")");
  }

  NodeId ParseExternalDeclaration() {
    const std::size_t first = pos_;
    NodeId node = NewNode(NodeKind::kDeclaration, first);
    Declaration decl;
    decl.node = node;
    decl.file_scope = true;
    Specifiers spec = ParseSpecifiers(UnresolvedPolicy::kFileScope, node);
    decl.is_typedef = spec.is_typedef;
    decl.is_static = spec.is_static;
    decl.is_extern = spec.is_extern;
    decl.is_inline = spec.is_inline;
    if (Accept(";")) {
      Finish(node);
      return Register(node, std::move(decl));
    }
    DeclaratorInfo first_declarator = ParseDeclarator(spec.base, false, node);
    if (first_declarator.type->kind == TypeKind::kFunction && At("{")) {
      N(node).kind = NodeKind::kFunctionDef;
      Declarator d{first_declarator.name, first_declarator.name_token,
                   first_declarator.type, kNoNode, first_declarator.param_names};
      decl.declarators.push_back(d);
      Declare(d.name, {d.type, false, std::nullopt});
      scopes_.emplace_back();
      const auto& params = first_declarator.type->params;
      for (std::size_t i = 0; i < params.size(); ++i) {
        Declare(first_declarator.param_names[i], {params[i], false, std::nullopt});
      }
      NodeId body = ParseCompound(/*new_scope=*/false);
      scopes_.pop_back();
      Adopt(node, body);
      Finish(node);
      return Register(node, std::move(decl));
    }
    FinishDeclarators(node, decl, spec, std::move(first_declarator));
    Finish(node);
    return Register(node, std::move(decl));
  }

  NodeId Register(NodeId node, Declaration decl) {
    N(node).decl = static_cast<int>(unit_.declarations.size());
    unit_.declarations.push_back(std::move(decl));
    return node;
  }

  // Handles `= init` and further `, declarator` items, then the ';'.
  void FinishDeclarators(NodeId node, Declaration& decl, const Specifiers& spec,
                         DeclaratorInfo info) {
    while (true) {
      Declarator d{info.name, info.name_token, info.type, kNoNode, info.param_names};
      if (!spec.is_typedef && Accept("=")) {
        d.init = ParseInitializer();
        Adopt(node, d.init);
        if (d.type->kind == TypeKind::kArray && d.type->array_length == 0 &&
            N(d.init).kind == NodeKind::kInitList) {
          d.type = MakeArray(d.type->pointee, N(d.init).children.size());
        }
      }
      if (spec.is_typedef) {
        Declare(d.name, {WithTypedefName(d.type, d.name), true, std::nullopt});
      } else {
        Declare(d.name, {d.type, false, std::nullopt});
      }
      decl.declarators.push_back(std::move(d));
      if (!Accept(",")) break;
      info = ParseDeclarator(spec.base, false, node);
    }
    Expect(";");
  }

  NodeId ParseLocalDeclaration(bool is_statement) {
    const std::size_t first = pos_;
    NodeId stmt = kNoNode;
    if (is_statement) stmt = NewNode(NodeKind::kDeclStmt, first);
    NodeId node = NewNode(NodeKind::kDeclaration, first);
    Declaration decl;
    decl.node = node;
    Specifiers spec = ParseSpecifiers(UnresolvedPolicy::kNever, node);
    decl.is_typedef = spec.is_typedef;
    decl.is_static = spec.is_static;
    decl.is_extern = spec.is_extern;
    if (!Accept(";")) {
      DeclaratorInfo info = ParseDeclarator(spec.base, false, node);
      FinishDeclarators(node, decl, spec, std::move(info));
    }
    Finish(node);
    Register(node, std::move(decl));
    if (stmt == kNoNode) return node;
    Adopt(stmt, node);
    Finish(stmt);
    return stmt;
  }

  NodeId ParseInitializer() {
    if (!At("{")) return ParseAssignment();
    NodeId list = NewNode(NodeKind::kInitList, pos_);
    ++pos_;
    while (!Accept("}")) {
      // Designators are kept inside the element's token range.
      while (At(".") || At("[")) {
        if (Accept(".")) {
          ExpectIdentifier();
        } else {
          ++pos_;
          NodeId index = ParseConditional();
          MarkConstant(index);
          Adopt(list, index);
          Expect("]");
        }
        if (!At(".") && !At("[")) Expect("=");
      }
      Adopt(list, ParseInitializer());
      if (!Accept(",")) {
        Expect("}");
        break;
      }
    }
    Finish(list);
    return list;
  }

  // ---- statements ---------------------------------------------------------
  NodeId ParseCompound(bool new_scope) {
    NodeId node = NewNode(NodeKind::kCompound, pos_);
    Expect("{");
    if (new_scope) scopes_.emplace_back();
    while (!Accept("}")) {
      if (Cur().kind == TokenKind::kEnd) Fail({"'}'"});
      if (StartsDeclaration()) {
        Adopt(node, ParseLocalDeclaration(true));
      } else {
        Adopt(node, ParseStatement());
      }
    }
    if (new_scope) scopes_.pop_back();
    Finish(node);
    return node;
  }

  NodeId ParseParenCondition(NodeId parent) {
    Expect("(");
    NodeId cond = ParseExpression();
    Adopt(parent, cond);
    Expect(")");
    return cond;
  }

  NodeId ParseStatement() {
    const Token& token = Cur();
    const std::size_t first = pos_;
    if (token.Is("{")) return ParseCompound(true);
    if (token.Is(";")) {
      NodeId node = NewNode(NodeKind::kEmpty, first);
      ++pos_;
      Finish(node);
      return node;
    }
    if (token.kind == TokenKind::kIdentifier && Ahead(1).Is(":")) Unsupported("label");
    if (token.kind == TokenKind::kKeyword) {
      const std::string& w = token.lexeme;
      if (w == "if") {
        NodeId node = NewNode(NodeKind::kIf, first);
        ++pos_;
        ParseParenCondition(node);
        Adopt(node, ParseStatement());
        if (Accept("else")) Adopt(node, ParseStatement());
        Finish(node);
        return node;
      }
      if (w == "while") {
        NodeId node = NewNode(NodeKind::kWhile, first);
        ++pos_;
        ParseParenCondition(node);
        Adopt(node, ParseStatement());
        Finish(node);
        return node;
      }
      if (w == "do") {
        NodeId node = NewNode(NodeKind::kDoWhile, first);
        ++pos_;
        Adopt(node, ParseStatement());
        Expect("while");
        ParseParenCondition(node);
        Expect(";");
        Finish(node);
        return node;
      }
      if (w == "for") return ParseFor();
      if (w == "switch") {
        NodeId node = NewNode(NodeKind::kSwitch, first);
        ++pos_;
        ParseParenCondition(node);
        Adopt(node, ParseStatement());
        Finish(node);
        return node;
      }
      if (w == "case") {
        NodeId node = NewNode(NodeKind::kCase, first);
        ++pos_;
        NodeId value = ParseConditional();
        MarkConstant(value);
        Adopt(node, value);
        Expect(":");
        Adopt(node, ParseStatement());
        Finish(node);
        return node;
      }
      if (w == "default") {
        NodeId node = NewNode(NodeKind::kDefault, first);
        ++pos_;
        Expect(":");
        Adopt(node, ParseStatement());
        Finish(node);
        return node;
      }
      if (w == "return") {
        NodeId node = NewNode(NodeKind::kReturn, first);
        ++pos_;
        if (!At(";")) Adopt(node, ParseExpression());
        Expect(";");
        Finish(node);
        return node;
      }
      if (w == "break" || w == "continue") {
        NodeId node =
            NewNode(w == "break" ? NodeKind::kBreak : NodeKind::kContinue, first);
        ++pos_;
        Expect(";");
        Finish(node);
        return node;
      }
      if (w == "goto") Unsupported("goto");
      if (w == "else") Fail({"statement"});
    }
    NodeId node = NewNode(NodeKind::kExprStmt, first);
    Adopt(node, ParseExpression());
    Expect(";");
    Finish(node);
    return node;
  }

  NodeId ParseFor() {
    NodeId node = NewNode(NodeKind::kFor, pos_);
    ++pos_;
    Expect("(");
    scopes_.emplace_back();
    if (Accept(";")) {
      Adopt(node, kNoNode);
    } else if (StartsDeclaration()) {
      Adopt(node, ParseLocalDeclaration(false));
    } else {
      Adopt(node, ParseExpression());
      Expect(";");
    }
    if (At(";")) {
      Adopt(node, kNoNode);
    } else {
      Adopt(node, ParseExpression());
    }
    Expect(";");
    if (At(")")) {
      Adopt(node, kNoNode);
    } else {
      Adopt(node, ParseExpression());
    }
    Expect(")");
    Adopt(node, ParseStatement());
    scopes_.pop_back();
    Finish(node);
    return node;
  }

  // ---- expressions --------------------------------------------------------
  NodeId ParseExpression() {
    NodeId lhs = ParseAssignment();
    while (At(",")) {
      NodeId node = NewNode(NodeKind::kBinary, N(lhs).first_token);
      N(node).op = ",";
      ++pos_;
      Adopt(node, lhs);
      NodeId rhs = ParseAssignment();
      Adopt(node, rhs);
      N(node).type = N(rhs).type;
      Finish(node);
      lhs = node;
    }
    return lhs;
  }

  NodeId ParseAssignment() {
    NodeId lhs = ParseConditional();
    if (Cur().kind == TokenKind::kPunctuator && IsAssignOp(Cur().lexeme)) {
      NodeId node = NewNode(NodeKind::kAssign, N(lhs).first_token);
      N(node).op = Cur().lexeme;
      ++pos_;
      Adopt(node, lhs);
      Adopt(node, ParseAssignment());
      N(node).type = N(lhs).type;
      Finish(node);
      return node;
    }
    return lhs;
  }

  NodeId ParseConditional() {
    NodeId cond = ParseBinary(1);
    if (!At("?")) return cond;
    NodeId node = NewNode(NodeKind::kConditional, N(cond).first_token);
    ++pos_;
    Adopt(node, cond);
    NodeId then_branch = ParseExpression();
    Adopt(node, then_branch);
    Expect(":");
    NodeId else_branch = ParseConditional();
    Adopt(node, else_branch);
    N(node).type = ArithmeticResult(N(then_branch).type, N(else_branch).type);
    if (!N(node).type) N(node).type = N(then_branch).type;
    Finish(node);
    return node;
  }

  NodeId ParseBinary(int min_precedence) {
    NodeId lhs = ParseUnary();
    while (Cur().kind == TokenKind::kPunctuator) {
      const std::string op = Cur().lexeme;
      const int precedence = BinaryPrecedence(op);
      if (precedence == 0 || precedence < min_precedence) break;
      ++pos_;
      NodeId rhs = ParseBinary(precedence + 1);
      NodeId node = NewNode(NodeKind::kBinary, N(lhs).first_token);
      N(node).op = op;
      Adopt(node, lhs);
      Adopt(node, rhs);
      N(node).type = BinaryResultType(op, N(lhs).type, N(rhs).type);
      Finish(node);
      lhs = node;
    }
    return lhs;
  }

  NodeId ParseUnary() {
    const std::size_t first = pos_;
    const Token& token = Cur();
    if (token.Is("++") || token.Is("--")) {
      NodeId node = NewNode(NodeKind::kUnary, first);
      N(node).op = token.lexeme;
      ++pos_;
      NodeId operand = ParseUnary();
      Adopt(node, operand);
      N(node).type = N(operand).type;
      Finish(node);
      return node;
    }
    if (token.Is("-") || token.Is("+") || token.Is("!") || token.Is("~") ||
        token.Is("*") || token.Is("&")) {
      NodeId node = NewNode(NodeKind::kUnary, first);
      const std::string op = token.lexeme;
      N(node).op = op;
      ++pos_;
      NodeId operand = ParseUnary();
      Adopt(node, operand);
      const TypePtr& t = N(operand).type;
      if (op == "!") {
        N(node).type = IntType();
      } else if (op == "*") {
        if (t && IsPointerLike(*t)) N(node).type = Complete(t->pointee);
      } else if (op == "&") {
        if (t) N(node).type = MakePointer(t);
      } else {
        N(node).type = t;
      }
      Finish(node);
      return node;
    }
    if (token.Is("sizeof")) {
      ++pos_;
      if (At("(") && StartsTypeName(Ahead(1))) {
        NodeId node = NewNode(NodeKind::kSizeofType, first);
        ++pos_;
        TypePtr type = ParseTypeName(node);
        Expect(")");
        N(node).type = UnsignedLongType();
        sizeof_values_[node] = static_cast<std::int64_t>(Complete(type)->size_bytes);
        Finish(node);
        return node;
      }
      NodeId node = NewNode(NodeKind::kSizeofExpr, first);
      NodeId operand = ParseUnary();
      Adopt(node, operand);
      N(node).type = UnsignedLongType();
      if (N(operand).type) {
        sizeof_values_[node] =
            static_cast<std::int64_t>(Complete(N(operand).type)->size_bytes);
      }
      Finish(node);
      return node;
    }
    return ParseCast();
  }

  NodeId ParseCast() {
    if (At("(") && StartsTypeName(Ahead(1))) {
      const std::size_t first = pos_;
      NodeId node = NewNode(NodeKind::kCast, first);
      ++pos_;
      TypePtr type = ParseTypeName(node);
      Expect(")");
      if (At("{")) Unsupported("compound literal");
      Adopt(node, ParseUnary());
      N(node).type = type;
      Finish(node);
      return node;
    }
    return ParsePostfix();
  }

  TypePtr ParseTypeName(NodeId attach_to) {
    Specifiers spec = ParseSpecifiers(UnresolvedPolicy::kNever, attach_to);
    DeclaratorInfo info = ParseDeclarator(spec.base, true, attach_to);
    if (info.has_name) Fail({"')'"});
    return info.type;
  }

  NodeId ParsePostfix() {
    NodeId expr = ParsePrimary();
    while (true) {
      const std::size_t first = N(expr).first_token;
      if (At("[")) {
        NodeId node = NewNode(NodeKind::kIndex, first);
        ++pos_;
        Adopt(node, expr);
        Adopt(node, ParseExpression());
        Expect("]");
        const TypePtr& base = N(expr).type;
        if (base && IsPointerLike(*base)) N(node).type = Complete(base->pointee);
        Finish(node);
        expr = node;
      } else if (At("(")) {
        NodeId node = NewNode(NodeKind::kCall, first);
        ++pos_;
        Adopt(node, expr);
        if (!At(")")) {
          while (true) {
            Adopt(node, ParseAssignment());
            if (!Accept(",")) break;
          }
        }
        Expect(")");
        const TypePtr& callee = N(expr).type;
        if (callee && callee->kind == TypeKind::kFunction) {
          N(node).type = callee->pointee;
        }
        Finish(node);
        expr = node;
      } else if (At(".") || At("->")) {
        NodeId node = NewNode(NodeKind::kMember, first);
        const bool arrow = At("->");
        N(node).op = Cur().lexeme;
        ++pos_;
        Adopt(node, expr);
        std::string member = ExpectIdentifier();
        TypePtr base = N(expr).type;
        if (base && arrow) base = IsPointerLike(*base) ? base->pointee : nullptr;
        if (base) N(node).type = FindMember(Complete(base), member);
        N(node).name = member;
        Finish(node);
        expr = node;
      } else if (At("++") || At("--")) {
        NodeId node = NewNode(NodeKind::kPostfix, first);
        N(node).op = Cur().lexeme;
        ++pos_;
        Adopt(node, expr);
        N(node).type = N(expr).type;
        Finish(node);
        expr = node;
      } else {
        return expr;
      }
    }
  }

  NodeId ParsePrimary() {
    const std::size_t first = pos_;
    const Token& token = Cur();
    switch (token.kind) {
      case TokenKind::kIdentifier: {
        NodeId node = NewNode(NodeKind::kIdent, first);
        N(node).name = token.lexeme;
        if (const Symbol* symbol = Lookup(token.lexeme)) {
          if (symbol->is_typedef) Fail({"expression"});
          N(node).type = symbol->type;
          if (symbol->constant) {
            ident_constants_[node] = *symbol->constant;
            N(node).op = "const";
          }
        }
        ++pos_;
        Finish(node);
        return node;
      }
      case TokenKind::kIntLiteral: {
        NodeId node = NewNode(NodeKind::kIntLit, first);
        std::string lower = token.lexeme;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const bool is_unsigned = lower.find('u') != std::string::npos;
        const bool is_long = lower.find('l') != std::string::npos;
        N(node).type = is_long ? (is_unsigned ? UnsignedLongType() : LongType())
                               : (is_unsigned ? UnsignedIntType() : IntType());
        ++pos_;
        Finish(node);
        return node;
      }
      case TokenKind::kFloatLiteral: {
        NodeId node = NewNode(NodeKind::kFloatLit, first);
        const char last = token.lexeme.back();
        N(node).type = (last == 'f' || last == 'F')
                           ? MakeScalar(TypeKind::kFloat, 4, "float")
                           : DoubleType();
        ++pos_;
        Finish(node);
        return node;
      }
      case TokenKind::kCharLiteral: {
        NodeId node = NewNode(NodeKind::kCharLit, first);
        N(node).type = IntType();
        ++pos_;
        Finish(node);
        return node;
      }
      case TokenKind::kStringLiteral: {
        NodeId node = NewNode(NodeKind::kStringLit, first);
        while (Cur().kind == TokenKind::kStringLiteral) ++pos_;
        N(node).type = MakePointer(CharType());
        Finish(node);
        return node;
      }
      default:
        break;
    }
    if (token.Is("(")) {
      NodeId node = NewNode(NodeKind::kParen, first);
      ++pos_;
      NodeId inner = ParseExpression();
      Adopt(node, inner);
      Expect(")");
      N(node).type = N(inner).type;
      Finish(node);
      return node;
    }
    Fail({"expression"});
  }

  // ---- typing -------------------------------------------------------------
  TypePtr Complete(const TypePtr& type) const {
    if (!type || type->complete) return type;
    if (type->kind == TypeKind::kStruct || type->kind == TypeKind::kUnion) {
      auto found = unit_.tags.find(type->tag);
      if (found != unit_.tags.end() && found->second->complete) {
        return type->named && type->spelling != found->second->spelling
                   ? WithTypedefName(found->second, type->spelling)
                   : found->second;
      }
    }
    return type;
  }

  static TypePtr FindMember(const TypePtr& record, const std::string& name) {
    if (!record) return nullptr;
    for (const auto& member : record->members) {
      if (member.name == name) return member.type;
      if (member.name.empty()) {
        if (TypePtr nested = FindMember(member.type, name)) return nested;
      }
    }
    return nullptr;
  }

  static TypePtr ArithmeticResult(const TypePtr& a, const TypePtr& b) {
    if (!a || !b) return nullptr;
    if (IsFloating(*a) || IsFloating(*b)) {
      if (IsFloating(*a) && (!IsFloating(*b) || a->size_bytes >= b->size_bytes)) return a;
      return b;
    }
    if (IsIntegral(*a) && IsIntegral(*b)) {
      std::size_t size = std::max<std::size_t>({a->size_bytes, b->size_bytes, 4});
      bool is_unsigned = (a->kind == TypeKind::kUnsignedInt && a->size_bytes >= 4) ||
                         (b->kind == TypeKind::kUnsignedInt && b->size_bytes >= 4);
      if (size == 8) return is_unsigned ? UnsignedLongType() : LongType();
      return is_unsigned ? UnsignedIntType() : IntType();
    }
    return nullptr;
  }

  static TypePtr BinaryResultType(const std::string& op, const TypePtr& a,
                                  const TypePtr& b) {
    const int precedence = BinaryPrecedence(op);
    if (precedence <= 2 || precedence == 6 || precedence == 7) return IntType();
    if (op == "<<" || op == ">>") {
      return a && IsIntegral(*a) ? ArithmeticResult(a, IntType()) : a;
    }
    if (a && b && (op == "+" || op == "-")) {
      const bool pa = IsPointerLike(*a);
      const bool pb = IsPointerLike(*b);
      if (pa && pb) return LongType();
      if (pa) return a->kind == TypeKind::kArray ? MakePointer(a->pointee) : a;
      if (pb) return b->kind == TypeKind::kArray ? MakePointer(b->pointee) : b;
    }
    return ArithmeticResult(a, b);
  }

  // ---- constants ----------------------------------------------------------
  void MarkConstant(NodeId id) {
    if (id == kNoNode) return;
    N(id).constant_context = true;
    for (NodeId child : N(id).children) MarkConstant(child);
  }

  std::optional<std::int64_t> EvalConst(NodeId id) const {
    const Node& node = unit_.nodes[static_cast<std::size_t>(id)];
    auto child = [&](std::size_t i) { return EvalConst(node.children[i]); };
    switch (node.kind) {
      case NodeKind::kIntLit:
        return ParseIntLiteral(unit_.tokens[node.first_token].lexeme);
      case NodeKind::kCharLit:
        return CharLiteralValue(unit_.tokens[node.first_token].lexeme);
      case NodeKind::kIdent: {
        auto found = ident_constants_.find(id);
        if (found == ident_constants_.end()) return std::nullopt;
        return found->second;
      }
      case NodeKind::kParen:
      case NodeKind::kCast:
        return child(0);
      case NodeKind::kSizeofExpr:
      case NodeKind::kSizeofType: {
        auto found = sizeof_values_.find(id);
        if (found == sizeof_values_.end()) return std::nullopt;
        return found->second;
      }
      case NodeKind::kUnary: {
        auto v = child(0);
        if (!v) return std::nullopt;
        if (node.op == "-") return -*v;
        if (node.op == "+") return *v;
        if (node.op == "~") return ~*v;
        if (node.op == "!") return *v == 0 ? 1 : 0;
        return std::nullopt;
      }
      case NodeKind::kConditional: {
        auto c = child(0);
        if (!c) return std::nullopt;
        return *c ? child(1) : child(2);
      }
      case NodeKind::kBinary: {
        auto a = child(0);
        auto b = child(1);
        if (!a || !b) return std::nullopt;
        const std::string& op = node.op;
        if (op == "+") return *a + *b;
        if (op == "-") return *a - *b;
        if (op == "*") return *a * *b;
        if (op == "/") return *b == 0 ? std::nullopt : std::optional(*a / *b);
        if (op == "%") return *b == 0 ? std::nullopt : std::optional(*a % *b);
        if (op == "<<") return *a << *b;
        if (op == ">>") return *a >> *b;
        if (op == "&") return *a & *b;
        if (op == "|") return *a | *b;
        if (op == "^") return *a ^ *b;
        if (op == "<") return *a < *b;
        if (op == "<=") return *a <= *b;
        if (op == ">") return *a > *b;
        if (op == ">=") return *a >= *b;
        if (op == "==") return *a == *b;
        if (op == "!=") return *a != *b;
        if (op == "&&") return *a && *b;
        if (op == "||") return *a || *b;
        if (op == ",") return *b;
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  // ---- statement index ----------------------------------------------------
  bool IsProbe(const Node& node) const {
    if (node.kind != NodeKind::kExprStmt) return false;
    const Token& token = unit_.tokens[node.first_token];
    return token.kind == TokenKind::kIdentifier && token.lexeme.rfind("__mf_", 0) == 0;
  }

  void BuildStatementIndex() {
    std::vector<NodeId> stack = {0};
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      const Node& node = unit_.nodes[static_cast<std::size_t>(id)];
      if (IsStatementKind(node.kind) && node.kind != NodeKind::kCompound &&
          node.kind != NodeKind::kCase && node.kind != NodeKind::kDefault &&
          !IsProbe(node)) {
        unit_.statements.push_back(id);
      }
      for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
        if (*it != kNoNode) stack.push_back(*it);
      }
    }
    std::stable_sort(unit_.statements.begin(), unit_.statements.end(),
                     [&](NodeId a, NodeId b) {
                       return unit_.node(a).span.begin < unit_.node(b).span.begin;
                     });
  }

  SourceUnit unit_;
  std::size_t pos_ = 0;
  std::vector<std::map<std::string, Symbol>> scopes_;
  std::map<NodeId, std::int64_t> ident_constants_;
  std::map<NodeId, std::int64_t> sizeof_values_;
};

}  // namespace

SourceUnit Parse(std::string_view source, std::string_view path) {
  Parser parser(source, path);
  return parser.Run();
}

}  // namespace mutafuzz::cfront
