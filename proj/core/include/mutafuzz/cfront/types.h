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

#ifndef MUTAFUZZ_CFRONT_TYPES_H_
#define MUTAFUZZ_CFRONT_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mutafuzz::cfront {

enum class TypeKind {
  kSignedInt,
  kUnsignedInt,
  kFloat,
  kChar,
  kBool,
  kEnum,
  kStruct,
  kArray,
  kPointer,
  kVoid,
  // Parsed but never valid inside a FunctionSignature.
  kUnion,
  kFunction,
  kUnresolved,
};

std::string_view TypeKindName(TypeKind kind);

struct TypeDescriptor;
using TypePtr = std::shared_ptr<const TypeDescriptor>;

struct StructMember {
  std::string name;
  TypePtr type;
  std::size_t offset = 0;
};

struct Enumerator {
  std::string name;
  std::int64_t value = 0;
};

struct TypeDescriptor {
  TypeKind kind = TypeKind::kVoid;
  std::size_t size_bytes = 0;
  std::size_t align = 1;
  // C spelling of the type. When `named` is set the spelling is a complete
  // type name ("int", "T_POS", "struct node") usable as `spelling ident`.
  std::string spelling;
  bool named = true;
  bool is_const = false;
  bool is_signed = true;  // for kChar
  TypePtr pointee;        // pointer target, array element, function return
  std::size_t array_length = 0;
  std::vector<StructMember> members;    // struct/union
  std::vector<Enumerator> enumerators;  // enum
  std::vector<TypePtr> params;          // function
  bool variadic = false;
  std::string tag;        // struct/union/enum tag, or the unresolved name
  bool complete = true;   // false for forward-declared struct/union
};

TypePtr MakeScalar(TypeKind kind, std::size_t size, std::string spelling,
                   bool is_signed = true);
TypePtr MakePointer(TypePtr pointee);
TypePtr MakeArray(TypePtr element, std::size_t length);
// Lays out members: each member at its own alignment, total padded to the
// largest member alignment.
TypePtr MakeStruct(std::string tag, std::vector<StructMember> members,
                   bool is_union);
TypePtr MakeIncompleteRecord(std::string tag, bool is_union);
TypePtr MakeEnum(std::string tag, std::vector<Enumerator> enumerators);
TypePtr MakeFunction(TypePtr result, std::vector<TypePtr> params, bool variadic);
TypePtr MakeUnresolved(std::string name);
// Copy of `type` spelled by a typedef name.
TypePtr WithTypedefName(const TypePtr& type, std::string name);
TypePtr WithConst(const TypePtr& type);

bool IsArithmetic(const TypeDescriptor& type);
bool IsFloating(const TypeDescriptor& type);
bool IsIntegral(const TypeDescriptor& type);
bool IsPointerLike(const TypeDescriptor& type);  // pointer or array
bool IsScalar(const TypeDescriptor& type);

// Renders a declaration of `name` with this type, e.g. "int name[4]" or
// "T_POS name". Qualifiers are dropped so the variable is writable.
std::string DeclareVariable(const TypeDescriptor& type, std::string_view name);

}  // namespace mutafuzz::cfront

#endif  // MUTAFUZZ_CFRONT_TYPES_H_
