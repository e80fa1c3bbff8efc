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

#include "mutafuzz/cfront/types.h"

#include <algorithm>
#include <utility>

namespace mutafuzz::cfront {

std::string_view TypeKindName(TypeKind kind) {
  switch (kind) {
    case TypeKind::kSignedInt: return "signed-int";
    case TypeKind::kUnsignedInt: return "unsigned-int";
    case TypeKind::kFloat: return "float";
    case TypeKind::kChar: return "char";
    case TypeKind::kBool: return "bool";
    case TypeKind::kEnum: return "enum";
    case TypeKind::kStruct: return "struct";
    case TypeKind::kArray: return "array";
    case TypeKind::kPointer: return "pointer-to";
    case TypeKind::kVoid: return "void";
    case TypeKind::kUnion: return "union";
    case TypeKind::kFunction: return "function";
    case TypeKind::kUnresolved: return "unresolved";
  }
  return "?";
}

TypePtr MakeScalar(TypeKind kind, std::size_t size, std::string spelling,
                   bool is_signed) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = kind;
  type->size_bytes = size;
  type->align = size == 0 ? 1 : size;
  type->spelling = std::move(spelling);
  type->is_signed = is_signed;
  return type;
}

TypePtr MakePointer(TypePtr pointee) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = TypeKind::kPointer;
  type->size_bytes = 8;
  type->align = 8;
  type->named = false;
  type->pointee = std::move(pointee);
  return type;
}

TypePtr MakeArray(TypePtr element, std::size_t length) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = TypeKind::kArray;
  type->size_bytes = element->size_bytes * length;
  type->align = element->align;
  type->named = false;
  type->array_length = length;
  type->pointee = std::move(element);
  return type;
}

TypePtr MakeStruct(std::string tag, std::vector<StructMember> members,
                   bool is_union) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = is_union ? TypeKind::kUnion : TypeKind::kStruct;
  type->tag = tag;
  type->spelling = tag.empty() ? std::string() :
                   std::string(is_union ? "union " : "struct ") + tag;
  type->named = !tag.empty();
  std::size_t offset = 0;
  std::size_t max_align = 1;
  std::size_t max_size = 0;
  for (auto& member : members) {
    const std::size_t align = std::max<std::size_t>(member.type->align, 1);
    max_align = std::max(max_align, align);
    if (is_union) {
      member.offset = 0;
      max_size = std::max(max_size, member.type->size_bytes);
    } else {
      offset = (offset + align - 1) / align * align;
      member.offset = offset;
      offset += member.type->size_bytes;
    }
  }
  std::size_t raw = is_union ? max_size : offset;
  type->size_bytes = (raw + max_align - 1) / max_align * max_align;
  type->align = max_align;
  type->members = std::move(members);
  return type;
}

TypePtr MakeIncompleteRecord(std::string tag, bool is_union) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = is_union ? TypeKind::kUnion : TypeKind::kStruct;
  type->spelling = std::string(is_union ? "union " : "struct ") + tag;
  type->tag = std::move(tag);
  type->complete = false;
  return type;
}

TypePtr MakeEnum(std::string tag, std::vector<Enumerator> enumerators) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = TypeKind::kEnum;
  type->size_bytes = 4;
  type->align = 4;
  type->spelling = tag.empty() ? std::string("int") : "enum " + tag;
  type->tag = std::move(tag);
  type->enumerators = std::move(enumerators);
  return type;
}

TypePtr MakeFunction(TypePtr result, std::vector<TypePtr> params, bool variadic) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = TypeKind::kFunction;
  type->named = false;
  type->pointee = std::move(result);
  type->params = std::move(params);
  type->variadic = variadic;
  return type;
}

TypePtr MakeUnresolved(std::string name) {
  auto type = std::make_shared<TypeDescriptor>();
  type->kind = TypeKind::kUnresolved;
  type->spelling = name;
  type->tag = std::move(name);
  type->complete = false;
  return type;
}

TypePtr WithTypedefName(const TypePtr& type, std::string name) {
  auto copy = std::make_shared<TypeDescriptor>(*type);
  copy->spelling = std::move(name);
  copy->named = true;
  return copy;
}

TypePtr WithConst(const TypePtr& type) {
  if (type->is_const) return type;
  auto copy = std::make_shared<TypeDescriptor>(*type);
  copy->is_const = true;
  return copy;
}

bool IsFloating(const TypeDescriptor& type) { return type.kind == TypeKind::kFloat; }

bool IsIntegral(const TypeDescriptor& type) {
  switch (type.kind) {
    case TypeKind::kSignedInt:
    case TypeKind::kUnsignedInt:
    case TypeKind::kChar:
    case TypeKind::kBool:
    case TypeKind::kEnum:
      return true;
    default:
      return false;
  }
}

bool IsArithmetic(const TypeDescriptor& type) {
  return IsIntegral(type) || IsFloating(type);
}

bool IsPointerLike(const TypeDescriptor& type) {
  return type.kind == TypeKind::kPointer || type.kind == TypeKind::kArray;
}

bool IsScalar(const TypeDescriptor& type) {
  return IsArithmetic(type) || type.kind == TypeKind::kPointer;
}

std::string DeclareVariable(const TypeDescriptor& type, std::string_view name) {
  if (type.named) return type.spelling + " " + std::string(name);
  switch (type.kind) {
    case TypeKind::kArray:
      return DeclareVariable(*type.pointee, std::string(name) + "[" +
                                                std::to_string(type.array_length) +
                                                "]");
    case TypeKind::kPointer: {
      std::string inner = "*" + std::string(name);
      if (type.pointee->kind == TypeKind::kArray && !type.pointee->named) {
        inner = "(" + inner + ")";
      }
      return DeclareVariable(*type.pointee, inner);
    }
    default:
      return type.spelling + " " + std::string(name);
  }
}

}  // namespace mutafuzz::cfront
