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

#include "mutafuzz/mutgen/mutgen.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <tuple>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/common/error.h"

namespace mutafuzz::mutgen {
namespace {

using cfront::ByteSpan;
using cfront::kNoNode;
using cfront::Node;
using cfront::NodeId;
using cfront::NodeKind;
using cfront::SourceUnit;
using cfront::TypeDescriptor;
using cfront::TypeKind;

const std::vector<std::string> kArithmetic = {"+", "-", "*", "/", "%"};
const std::vector<std::string> kRelational = {"<", "<=", ">", ">=", "==", "!="};
const std::vector<std::string> kBitwise = {"&", "|", "^"};
const std::vector<std::string> kShift = {"<<", ">>"};

bool Contains(const std::vector<std::string>& set, const std::string& op) {
  return std::find(set.begin(), set.end(), op) != set.end();
}

// Binding strength used to decide where parentheses are needed.
int BinaryPrecedence(const std::string& op) {
  if (op == "*" || op == "/" || op == "%") return 12;
  if (op == "+" || op == "-") return 11;
  if (op == "<<" || op == ">>") return 10;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 9;
  if (op == "==" || op == "!=") return 8;
  if (op == "&") return 7;
  if (op == "^") return 6;
  if (op == "|") return 5;
  if (op == "&&") return 4;
  if (op == "||") return 3;
  return 0;  // comma
}

int Precedence(const Node& node) {
  switch (node.kind) {
    case NodeKind::kBinary: return BinaryPrecedence(node.op);
    case NodeKind::kConditional: return 2;
    case NodeKind::kAssign: return 1;
    case NodeKind::kCast:
    case NodeKind::kUnary:
    case NodeKind::kSizeofExpr:
    case NodeKind::kSizeofType: return 13;
    default: return 14;
  }
}

bool IsSignedOrFloat(const TypeDescriptor& type) {
  return type.kind == TypeKind::kSignedInt || type.kind == TypeKind::kFloat ||
         (type.kind == TypeKind::kChar && type.is_signed) || type.kind == TypeKind::kEnum;
}

bool IsOperatorChar(char c) {
  return std::string_view("+-*/%<>=!&|^~").find(c) != std::string_view::npos;
}

class Enumerator {
 public:
  Enumerator(const SourceUnit& unit, const std::optional<CoveredSet>& covered)
      : unit_(unit), covered_(covered) {}

  std::vector<MutationPoint> Run() {
    for (NodeId def : unit_.FunctionDefinitions()) {
      function_ = unit_.FunctionName(def);
      const Node& fn = unit_.node(def);
      if (fn.children.empty()) continue;
      body_ = fn.children.back();
      Visit(body_);
    }
    std::stable_sort(points_.begin(), points_.end(),
                     [](const MutationPoint& a, const MutationPoint& b) {
                       return std::make_tuple(a.span.begin, OperatorName(a.op),
                                              b.span.end) <
                              std::make_tuple(b.span.begin, OperatorName(b.op),
                                              a.span.end);
                     });
    return std::move(points_);
  }

 private:
  const Node& N(NodeId id) const { return unit_.node(id); }
  std::string Text(NodeId id) const { return std::string(unit_.Text(id)); }

  void Add(Operator op, NodeId id, std::vector<std::string> replacements) {
    const Node& node = N(id);
    std::optional<std::size_t> ordinal;
    if (op == Operator::kSDL && node.kind == NodeKind::kCompound) {
      ordinal = FirstStatementWithin(node.span);
    } else {
      ordinal = unit_.EnclosingStatement(node.span);
    }
    if (!ordinal) return;
    if (covered_ && covered_->count(*ordinal) == 0) return;
    const std::string original = Text(id);
    std::vector<std::string> unique;
    for (auto& r : replacements) {
      if (r == original) continue;
      if (std::find(unique.begin(), unique.end(), r) != unique.end()) continue;
      unique.push_back(std::move(r));
    }
    if (unique.empty()) return;
    points_.push_back({op, node.span, *ordinal, function_, original, std::move(unique)});
  }

  std::optional<std::size_t> FirstStatementWithin(const ByteSpan& span) const {
    for (std::size_t i = 0; i < unit_.statements.size(); ++i) {
      if (span.Contains(N(unit_.statements[i]).span)) return i;
    }
    return std::nullopt;
  }

  bool Excluded(NodeId id) const {
    for (NodeId cur = id; cur != kNoNode; cur = N(cur).parent) {
      const Node& node = N(cur);
      if (node.constant_context) return true;
      if (node.kind == NodeKind::kSizeofExpr || node.kind == NodeKind::kSizeofType) {
        return true;
      }
      if (cur == body_) return false;
    }
    return true;
  }

  bool SideEffectFree(NodeId id) const {
    const Node& node = N(id);
    switch (node.kind) {
      case NodeKind::kAssign:
      case NodeKind::kPostfix:
      case NodeKind::kCall:
        return false;
      case NodeKind::kUnary:
        if (node.op == "++" || node.op == "--") return false;
        break;
      default:
        break;
    }
    for (NodeId child : node.children) {
      if (child != kNoNode && !SideEffectFree(child)) return false;
    }
    return true;
  }

  void Visit(NodeId id) {
    const Node& node = N(id);
    if (!Excluded(id)) {
      if (cfront::IsStatementKind(node.kind)) {
        VisitStatement(id);
      } else {
        VisitExpression(id);
      }
    }
    for (NodeId child : node.children) {
      if (child != kNoNode) Visit(child);
    }
  }

  void VisitStatement(NodeId id) {
    const Node& node = N(id);
    if (node.kind == NodeKind::kCompound) {
      if (id != body_ && !node.children.empty()) Add(Operator::kSDL, id, {";"});
      return;
    }
    if (node.kind == NodeKind::kDeclStmt || node.kind == NodeKind::kEmpty ||
        node.kind == NodeKind::kCase || node.kind == NodeKind::kDefault) {
      return;
    }
    if (unit_.StatementOrdinal(id)) Add(Operator::kSDL, id, {";"});
  }

  void VisitExpression(NodeId id) {
    const Node& node = N(id);
    switch (node.kind) {
      case NodeKind::kBinary:
        VisitBinary(id);
        break;
      case NodeKind::kIdent:
        VisitIdent(id);
        break;
      case NodeKind::kIntLit:
        VisitIntLiteral(id);
        break;
      case NodeKind::kFloatLit:
        VisitFloatLiteral(id);
        break;
      case NodeKind::kCharLit:
        if (Text(id) != "'\\0'") Add(Operator::kLVR, id, {"'\\0'"});
        break;
      default:
        break;
    }
  }

  // Lowest precedence an expression can have at `id`'s position without
  // parentheses.
  int RequiredPrecedence(NodeId id) const {
    const Node& node = N(id);
    if (node.parent == kNoNode) return 0;
    const Node& parent = N(node.parent);
    switch (parent.kind) {
      case NodeKind::kBinary: {
        const int p = BinaryPrecedence(parent.op);
        return parent.children[1] == id ? p + 1 : p;
      }
      case NodeKind::kUnary:
      case NodeKind::kCast:
      case NodeKind::kSizeofExpr:
        return 13;
      case NodeKind::kPostfix:
      case NodeKind::kMember:
        return 14;
      case NodeKind::kIndex:
      case NodeKind::kCall:
        return parent.children[0] == id ? 14 : 1;
      case NodeKind::kConditional:
        return parent.children[0] == id ? 3 : 2;
      case NodeKind::kAssign:
        return parent.children[0] == id ? 13 : 1;
      default:
        return 0;
    }
  }

  // Rebuilds `lhs op rhs` with a new operator, keeping the original spacing
  // and adding parentheses where the new precedence would regroup.
  std::string ReplaceOperator(NodeId id, const std::string& new_op) const {
    const Node& node = N(id);
    const Node& lhs = N(node.children[0]);
    const Node& rhs = N(node.children[1]);
    const ByteSpan op_span = unit_.tokens[lhs.end_token].span;
    const std::string& text = unit_.text;
    const int p_old = BinaryPrecedence(node.op);
    const int p_new = BinaryPrecedence(new_op);
    std::string left = Text(node.children[0]);
    std::string right = Text(node.children[1]);
    if (Precedence(lhs) < p_new) left = "(" + left + ")";
    if (Precedence(rhs) <= p_new) right = "(" + right + ")";
    std::string before = text.substr(lhs.span.end, op_span.begin - lhs.span.end);
    std::string after = text.substr(op_span.end, rhs.span.begin - op_span.end);
    if (before.empty() && IsOperatorChar(left.back())) before = " ";
    if (after.empty() && IsOperatorChar(right.front())) after = " ";
    std::string out = left + before + new_op + after + right;
    if (p_new < p_old && p_new < RequiredPrecedence(id)) out = "(" + out + ")";
    return out;
  }

  void VisitBinary(NodeId id) {
    const Node& node = N(id);
    const std::string& op = node.op;
    const cfront::TypePtr& lt = N(node.children[0]).type;
    const cfront::TypePtr& rt = N(node.children[1]).type;
    const bool any_float = (lt && cfront::IsFloating(*lt)) || (rt && cfront::IsFloating(*rt));
    const bool any_pointer =
        (lt && cfront::IsPointerLike(*lt)) || (rt && cfront::IsPointerLike(*rt));
    auto alternatives = [&](const std::vector<std::string>& set) {
      std::vector<std::string> out;
      for (const std::string& other : set) {
        if (other == op) continue;
        if (other == "%" && any_float) continue;
        out.push_back(ReplaceOperator(id, other));
      }
      return out;
    };
    auto deletions = [&]() {
      std::vector<std::string> out;
      const bool result_pointer = node.type && cfront::IsPointerLike(*node.type);
      for (NodeId child : node.children) {
        const cfront::TypePtr& t = N(child).type;
        if (t && cfront::IsPointerLike(*t) != result_pointer) continue;
        out.push_back(Text(child));
      }
      return out;
    };
    if (Contains(kArithmetic, op)) {
      if (!any_pointer) Add(Operator::kAOR, id, alternatives(kArithmetic));
      Add(Operator::kAOD, id, deletions());
      if (node.type && IsSignedOrFloat(*node.type) && SideEffectFree(id)) {
        AddAbs(id);
      }
    } else if (Contains(kRelational, op)) {
      Add(Operator::kROR, id, alternatives(kRelational));
      Add(Operator::kROD, id, deletions());
    } else if (op == "&&" || op == "||") {
      Add(Operator::kLCR, id, {ReplaceOperator(id, op == "&&" ? "||" : "&&")});
      Add(Operator::kLOD, id, deletions());
    } else if (Contains(kBitwise, op)) {
      Add(Operator::kBOD, id, deletions());
    } else if (Contains(kShift, op)) {
      Add(Operator::kSOD, id, deletions());
    }
  }

  void AddAbs(NodeId id) {
    const std::string e = "(" + Text(id) + ")";
    Add(Operator::kABS, id,
        {"(" + e + " < 0 ? -" + e + " : " + e + ")",
         "(" + e + " < 0 ? " + e + " : -" + e + ")"});
  }

  // A read of a scalar variable: not written, not addressed, not a base.
  bool IsVariableRead(NodeId id) const {
    const Node& node = N(id);
    if (node.op == "const" || !node.type) return false;
    if (!cfront::IsArithmetic(*node.type)) return false;
    const NodeId parent_id = node.parent;
    if (parent_id == kNoNode) return false;
    const Node& parent = N(parent_id);
    switch (parent.kind) {
      case NodeKind::kAssign:
        return parent.children[0] != id;
      case NodeKind::kPostfix:
      case NodeKind::kMember:
        return false;
      case NodeKind::kUnary:
        return parent.op != "&" && parent.op != "++" && parent.op != "--";
      case NodeKind::kCall:
      case NodeKind::kIndex:
        return parent.children[0] != id;
      default:
        return true;
    }
  }

  void VisitIdent(NodeId id) {
    if (!IsVariableRead(id)) return;
    const Node& node = N(id);
    const std::string v = Text(id);
    std::vector<std::string> uoi = {"(-" + v + ")", "(!" + v + ")"};
    if (!cfront::IsFloating(*node.type)) uoi.push_back("(~" + v + ")");
    Add(Operator::kUOI, id, uoi);
    if (IsSignedOrFloat(*node.type)) AddAbs(id);
  }

  void VisitIntLiteral(NodeId id) {
    const std::string lexeme = Text(id);
    std::size_t digits_end = lexeme.size();
    while (digits_end > 0 && std::string_view("uUlL").find(lexeme[digits_end - 1]) !=
                                 std::string_view::npos) {
      --digits_end;
    }
    const std::string suffix = lexeme.substr(digits_end);
    const std::string digits = lexeme.substr(0, digits_end);
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
    const long long c = static_cast<long long>(
        std::strtoull(digits.c_str() + start, nullptr, base));
    auto render = [&](long long v) {
      if (v < 0) return "(-" + std::to_string(-v) + suffix + ")";
      return std::to_string(v) + suffix;
    };
    std::vector<long long> values = {0, 1, -1, c + 1, c - 1, -c};
    std::vector<std::string> replacements;
    std::vector<long long> seen;
    for (long long v : values) {
      if (v == c || std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
      seen.push_back(v);
      replacements.push_back(render(v));
    }
    Add(Operator::kICR, id, replacements);
  }

  void VisitFloatLiteral(NodeId id) {
    const std::string lexeme = Text(id);
    std::size_t digits_end = lexeme.size();
    while (digits_end > 0 && std::string_view("fFlL").find(lexeme[digits_end - 1]) !=
                                 std::string_view::npos) {
      --digits_end;
    }
    const std::string suffix = lexeme.substr(digits_end);
    const double v = std::strtod(lexeme.substr(0, digits_end).c_str(), nullptr);
    auto format = [&](double x) {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
      std::string out(buf, end);
      if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
      return out + suffix;
    };
    std::vector<std::pair<double, std::string>> candidates = {
        {0.0, format(0.0)}, {-v, "(-" + lexeme + ")"}, {v + 1.0, format(v + 1.0)}};
    std::vector<std::string> replacements;
    std::vector<double> seen = {v};
    for (auto& [value, text] : candidates) {
      if (std::find(seen.begin(), seen.end(), value) != seen.end()) continue;
      seen.push_back(value);
      replacements.push_back(text);
    }
    Add(Operator::kLVR, id, replacements);
  }

  const SourceUnit& unit_;
  const std::optional<CoveredSet>& covered_;
  std::string function_;
  NodeId body_ = kNoNode;
  std::vector<MutationPoint> points_;
};

}  // namespace

std::vector<MutationPoint> EnumeratePoints(const SourceUnit& unit,
                                           const std::optional<CoveredSet>& covered) {
  return Enumerator(unit, covered).Run();
}

std::vector<Mutant> GenerateMutants(const SourceUnit& unit,
                                    const std::vector<MutationPoint>& points) {
  const std::string stem = std::filesystem::path(unit.path).stem().string();
  std::map<std::pair<std::string, Operator>, int> counters;
  std::vector<Mutant> out;
  for (const MutationPoint& point : points) {
    for (const std::string& replacement : point.replacements) {
      int& n = counters[{point.function, point.op}];
      ++n;
      Mutant m;
      m.id = stem + "-" + point.function + "-" + std::string(OperatorName(point.op)) +
             "-" + std::to_string(n);
      m.op = point.op;
      m.file = unit.path;
      m.function = point.function;
      m.statement_ordinal = point.statement_ordinal;
      m.span = point.span;
      m.original_fragment = point.original;
      m.replacement_fragment = replacement;
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::string Materialize(const SourceUnit& unit, const Mutant& mutant) {
  if (mutant.span.end > unit.text.size() ||
      unit.Text(mutant.span) != mutant.original_fragment) {
    throw Error(ErrorCode::kSpanMismatch,
                mutant.id + ": source no longer matches the recorded fragment");
  }
  return cfront::Render(unit, cfront::Patch{mutant.span, mutant.replacement_fragment});
}

}  // namespace mutafuzz::mutgen
