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
#include <sstream>
#include <utility>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/error.h"

namespace mutafuzz::cfront {

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kTranslationUnit: return "TranslationUnit";
    case NodeKind::kFunctionDef: return "FunctionDef";
    case NodeKind::kDeclaration: return "Declaration";
    case NodeKind::kCompound: return "Compound";
    case NodeKind::kExprStmt: return "ExprStmt";
    case NodeKind::kEmpty: return "Empty";
    case NodeKind::kDeclStmt: return "DeclStmt";
    case NodeKind::kIf: return "If";
    case NodeKind::kWhile: return "While";
    case NodeKind::kDoWhile: return "DoWhile";
    case NodeKind::kFor: return "For";
    case NodeKind::kReturn: return "Return";
    case NodeKind::kBreak: return "Break";
    case NodeKind::kContinue: return "Continue";
    case NodeKind::kSwitch: return "Switch";
    case NodeKind::kCase: return "Case";
    case NodeKind::kDefault: return "Default";
    case NodeKind::kBinary: return "Binary";
    case NodeKind::kUnary: return "Unary";
    case NodeKind::kPostfix: return "Postfix";
    case NodeKind::kAssign: return "Assign";
    case NodeKind::kConditional: return "Conditional";
    case NodeKind::kCall: return "Call";
    case NodeKind::kIndex: return "Index";
    case NodeKind::kMember: return "Member";
    case NodeKind::kCast: return "Cast";
    case NodeKind::kSizeofExpr: return "SizeofExpr";
    case NodeKind::kSizeofType: return "SizeofType";
    case NodeKind::kIdent: return "Ident";
    case NodeKind::kIntLit: return "IntLit";
    case NodeKind::kFloatLit: return "FloatLit";
    case NodeKind::kCharLit: return "CharLit";
    case NodeKind::kStringLit: return "StringLit";
    case NodeKind::kParen: return "Paren";
    case NodeKind::kInitList: return "InitList";
  }
  return "?";
}

bool IsStatementKind(NodeKind kind) {
  return kind >= NodeKind::kCompound && kind <= NodeKind::kDefault;
}

bool IsExpressionKind(NodeKind kind) {
  return kind >= NodeKind::kBinary && kind <= NodeKind::kInitList;
}

std::string_view SourceUnit::Text(NodeId id) const { return Text(node(id).span); }

std::string_view SourceUnit::Text(const ByteSpan& span) const {
  return std::string_view(text).substr(span.begin, span.size());
}

std::optional<std::size_t> SourceUnit::StatementOrdinal(NodeId id) const {
  auto it = std::find(statements.begin(), statements.end(), id);
  if (it == statements.end()) return std::nullopt;
  return static_cast<std::size_t>(it - statements.begin());
}

std::optional<std::size_t> SourceUnit::EnclosingStatement(const ByteSpan& span) const {
  std::optional<std::size_t> best;
  std::size_t best_size = 0;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const ByteSpan& s = node(statements[i]).span;
    if (!s.Contains(span)) continue;
    if (!best || s.size() <= best_size) {
      best = i;
      best_size = s.size();
    }
  }
  return best;
}

NodeId SourceUnit::EnclosingFunction(const ByteSpan& span) const {
  for (NodeId child : node(0).children) {
    const Node& n = node(child);
    if (n.kind == NodeKind::kFunctionDef && n.span.Contains(span)) return child;
  }
  return kNoNode;
}

std::vector<NodeId> SourceUnit::FunctionDefinitions() const {
  std::vector<NodeId> out;
  for (NodeId child : node(0).children) {
    if (node(child).kind == NodeKind::kFunctionDef) out.push_back(child);
  }
  return out;
}

std::string SourceUnit::FunctionName(NodeId function_def) const {
  const Node& n = node(function_def);
  if (n.decl < 0) return {};
  return declarations[static_cast<std::size_t>(n.decl)].declarators.at(0).name;
}

TypePtr SourceUnit::Complete(const TypePtr& type) const {
  if (!type || type->complete) return type;
  if (type->kind == TypeKind::kStruct || type->kind == TypeKind::kUnion) {
    auto found = tags.find(type->tag);
    if (found != tags.end() && found->second->complete) {
      if (type->named && type->spelling != found->second->spelling) {
        return WithTypedefName(found->second, type->spelling);
      }
      return found->second;
    }
  }
  return type;
}

std::string Render(const SourceUnit& unit, const std::optional<Patch>& patch) {
  if (!patch) return unit.text;
  bool matches = false;
  for (const Node& node : unit.nodes) {
    if (node.span == patch->span && node.end_token > node.first_token) {
      matches = true;
      break;
    }
  }
  if (!matches) {
    throw Error(ErrorCode::kSpanMismatch,
                "span [" + std::to_string(patch->span.begin) + ", " +
                    std::to_string(patch->span.end) + ") is not a node");
  }
  std::string out = unit.text.substr(0, patch->span.begin);
  out += patch->replacement;
  out += unit.text.substr(patch->span.end);
  return out;
}

std::string ApplyEdits(std::string_view text, std::vector<Edit> edits) {
  std::stable_sort(edits.begin(), edits.end(),
                   [](const Edit& a, const Edit& b) { return a.offset < b.offset; });
  std::string out;
  out.reserve(text.size() + edits.size() * 16);
  std::size_t cursor = 0;
  for (const Edit& edit : edits) {
    if (edit.offset < cursor || edit.offset + edit.length > text.size()) {
      throw Error(ErrorCode::kSpanMismatch,
                  "overlapping edit at byte " + std::to_string(edit.offset));
    }
    out.append(text.substr(cursor, edit.offset - cursor));
    out += edit.text;
    cursor = edit.offset + edit.length;
  }
  out.append(text.substr(cursor));
  return out;
}

namespace {

// Throws UnresolvedType for names that never received a definition.
void CheckResolved(const SourceUnit& unit, const TypePtr& type) {
  if (!type) return;
  if (type->kind == TypeKind::kUnresolved) {
    throw Error(ErrorCode::kUnresolvedType, type->tag);
  }
  if (type->kind == TypeKind::kPointer || type->kind == TypeKind::kArray) {
    CheckResolved(unit, type->pointee);
  }
}

}  // namespace

std::vector<FunctionSignature> ExtractSignatures(const SourceUnit& unit,
                                                 bool include_prototypes) {
  std::vector<FunctionSignature> out;
  for (NodeId child : unit.node(0).children) {
    const Node& n = unit.node(child);
    if (n.decl < 0) continue;
    const Declaration& decl = unit.declarations[static_cast<std::size_t>(n.decl)];
    if (decl.is_typedef) continue;
    const bool is_def = n.kind == NodeKind::kFunctionDef;
    if (!is_def && !include_prototypes) continue;
    for (const Declarator& d : decl.declarators) {
      if (d.type->kind != TypeKind::kFunction) continue;
      FunctionSignature sig;
      sig.name = d.name;
      sig.return_type = unit.Complete(d.type->pointee);
      CheckResolved(unit, sig.return_type);
      for (std::size_t i = 0; i < d.type->params.size(); ++i) {
        TypePtr type = d.type->params[i];
        CheckResolved(unit, type);
        if (type->kind == TypeKind::kPointer) {
          TypePtr pointee = unit.Complete(type->pointee);
          if (pointee != type->pointee) type = MakePointer(pointee);
        } else {
          type = unit.Complete(type);
        }
        std::string name =
            i < d.param_names.size() ? d.param_names[i] : "arg" + std::to_string(i);
        sig.params.push_back({std::move(name), std::move(type)});
      }
      sig.variadic = d.type->variadic;
      sig.node = child;
      out.push_back(std::move(sig));
      if (is_def) break;
    }
  }
  return out;
}

std::optional<FunctionSignature> FindSignature(const SourceUnit& unit,
                                               std::string_view name) {
  for (auto& sig : ExtractSignatures(unit)) {
    if (sig.name == name) return sig;
  }
  return std::nullopt;
}

std::string PrototypeText(const SourceUnit& unit, NodeId function_def,
                          std::string_view rename) {
  const Node& n = unit.node(function_def);
  if (n.kind != NodeKind::kFunctionDef || n.children.empty()) {
    throw Error(ErrorCode::kUnknownStatement, "not a function definition");
  }
  const Node& body = unit.node(n.children.back());
  const Declarator& d =
      unit.declarations[static_cast<std::size_t>(n.decl)].declarators.at(0);
  const ByteSpan name_span = unit.tokens[d.name_token].span;
  std::string header;
  if (rename.empty()) {
    header = unit.text.substr(n.span.begin, body.span.begin - n.span.begin);
  } else {
    header = unit.text.substr(n.span.begin, name_span.begin - n.span.begin);
    header += rename;
    header += unit.text.substr(name_span.end, body.span.begin - name_span.end);
  }
  while (!header.empty() && std::isspace(static_cast<unsigned char>(header.back()))) {
    header.pop_back();
  }
  return header + ";";
}

std::string TypePreamble(const SourceUnit& unit) {
  struct Piece {
    std::size_t offset;
    std::string text;
  };
  std::vector<Piece> pieces;
  for (const ByteSpan& directive : unit.directives) {
    pieces.push_back({directive.begin, std::string(unit.Text(directive))});
  }
  for (NodeId child : unit.node(0).children) {
    const Node& n = unit.node(child);
    if (n.kind != NodeKind::kDeclaration || n.decl < 0) continue;
    const Declaration& decl = unit.declarations[static_cast<std::size_t>(n.decl)];
    if (decl.is_typedef || decl.declarators.empty()) {
      pieces.push_back({n.span.begin, std::string(unit.Text(n.span))});
      continue;
    }
    // `struct s {...} var;` keeps only the record definition.
    const std::size_t name_token = decl.declarators.front().name_token;
    std::size_t last = name_token;
    while (last > n.first_token && unit.tokens[last - 1].Is("*")) --last;
    bool has_body = false;
    for (std::size_t t = n.first_token; t < last; ++t) {
      if (unit.tokens[t].Is("{")) has_body = true;
    }
    if (!has_body || last == n.first_token) continue;
    ByteSpan spec{n.span.begin, unit.tokens[last - 1].span.end};
    std::string text(unit.Text(spec));
    for (const char* storage : {"static ", "extern "}) {
      if (text.rfind(storage, 0) == 0) text.erase(0, std::char_traits<char>::length(storage));
    }
    pieces.push_back({n.span.begin, text + ";"});
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) { return a.offset < b.offset; });
  std::string out;
  for (const Piece& piece : pieces) {
    out += piece.text;
    out += '\n';
  }
  return out;
}

std::string DumpAst(const SourceUnit& unit) {
  std::ostringstream out;
  struct Frame {
    NodeId id;
    int depth;
  };
  std::vector<Frame> stack = {{0, 0}};
  while (!stack.empty()) {
    Frame frame = stack.back();
    stack.pop_back();
    const Node& n = unit.node(frame.id);
    out << std::string(static_cast<std::size_t>(frame.depth) * 2, ' ')
        << NodeKindName(n.kind) << " [" << n.span.begin << "," << n.span.end << ")";
    if (!n.op.empty()) out << " op=" << n.op;
    if (!n.name.empty()) out << " name=" << n.name;
    if (auto ordinal = unit.StatementOrdinal(frame.id)) out << " stmt=" << *ordinal;
    if (n.decl >= 0) {
      for (const auto& d : unit.declarations[static_cast<std::size_t>(n.decl)].declarators) {
        out << " decl=" << d.name;
      }
    }
    out << '\n';
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      if (*it != kNoNode) stack.push_back({*it, frame.depth + 1});
    }
  }
  return out.str();
}

}  // namespace mutafuzz::cfront
