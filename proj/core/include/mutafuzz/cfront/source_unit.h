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

#ifndef MUTAFUZZ_CFRONT_SOURCE_UNIT_H_
#define MUTAFUZZ_CFRONT_SOURCE_UNIT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/cfront/token.h"
#include "mutafuzz/cfront/types.h"

namespace mutafuzz::cfront {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class NodeKind {
  kTranslationUnit,
  kFunctionDef,
  kDeclaration,
  // Statements.
  kCompound,
  kExprStmt,
  kEmpty,
  kDeclStmt,
  kIf,
  kWhile,
  kDoWhile,
  kFor,
  kReturn,
  kBreak,
  kContinue,
  kSwitch,
  kCase,
  kDefault,
  // Expressions.
  kBinary,  // includes the comma operator
  kUnary,
  kPostfix,
  kAssign,
  kConditional,
  kCall,
  kIndex,
  kMember,
  kCast,
  kSizeofExpr,
  kSizeofType,
  kIdent,
  kIntLit,
  kFloatLit,
  kCharLit,
  kStringLit,
  kParen,
  kInitList,
};

std::string_view NodeKindName(NodeKind kind);
bool IsStatementKind(NodeKind kind);
bool IsExpressionKind(NodeKind kind);

// Children layout by kind (kNoNode marks an absent optional child):
//   FunctionDef [array sizes..., body]
//   Declaration [array sizes and initializers, in source order]
//   Compound [items...]          ExprStmt [expr]      DeclStmt [declaration]
//   If [cond, then, else?]       While [cond, body]   DoWhile [body, cond]
//   For [init?, cond?, step?, body]                   Return [expr?]
//   Switch [cond, body]          Case [value, stmt]   Default [stmt]
//   Binary/Assign [lhs, rhs]     Unary/Postfix/Paren/Cast/SizeofExpr [operand]
//   Conditional [cond, then, else]  Call [callee, args...]  Index [base, index]
//   Member [base]                InitList [elements...]
struct Node {
  NodeKind kind = NodeKind::kEmpty;
  ByteSpan span;
  std::size_t first_token = 0;
  std::size_t end_token = 0;  // one past the last token
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  // Operator; "." or "->" for Member; "const" for an Ident naming an
  // enumerator or builtin constant.
  std::string op;
  std::string name;  // identifier, or member name for Member
  int decl = -1;     // index into SourceUnit::declarations
  TypePtr type;      // expression type when known
  // Array sizes, enumerator values, case labels and designators.
  bool constant_context = false;
};

struct Declarator {
  std::string name;
  std::size_t name_token = 0;
  TypePtr type;
  NodeId init = kNoNode;
  std::vector<std::string> param_names;  // function declarators
};

struct Declaration {
  NodeId node = kNoNode;
  bool is_typedef = false;
  bool is_static = false;
  bool is_extern = false;
  bool is_inline = false;
  bool file_scope = false;
  std::vector<Declarator> declarators;
};

struct SourceUnit {
  std::string path;
  std::string text;
  std::vector<Token> tokens;
  std::vector<ByteSpan> directives;
  std::vector<Node> nodes;  // nodes[0] is the translation unit
  std::vector<Declaration> declarations;
  std::vector<NodeId> statements;  // the statement index, by start offset
  std::map<std::string, TypePtr> typedefs;
  std::map<std::string, TypePtr> tags;

  const Node& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
  std::string_view Text(NodeId id) const;
  std::string_view Text(const ByteSpan& span) const;

  // Position of `id` in the statement index, if it is an indexed statement.
  std::optional<std::size_t> StatementOrdinal(NodeId id) const;
  // Innermost indexed statement whose span contains `span`.
  std::optional<std::size_t> EnclosingStatement(const ByteSpan& span) const;
  // Function definition containing `span`, or kNoNode.
  NodeId EnclosingFunction(const ByteSpan& span) const;
  std::vector<NodeId> FunctionDefinitions() const;
  std::string FunctionName(NodeId function_def) const;
  // Resolves a forward-declared record through the tag table.
  TypePtr Complete(const TypePtr& type) const;
};

}  // namespace mutafuzz::cfront

#endif  // MUTAFUZZ_CFRONT_SOURCE_UNIT_H_
