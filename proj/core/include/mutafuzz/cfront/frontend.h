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

#ifndef MUTAFUZZ_CFRONT_FRONTEND_H_
#define MUTAFUZZ_CFRONT_FRONTEND_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutafuzz/cfront/source_unit.h"

namespace mutafuzz::cfront {

// Supported subset: function definitions and prototypes, typedefs,
// struct/union/enum definitions, file-scope and local variables, the
// statements if/else, while, do, for, switch/case/default, return, break,
// continue, expression and compound statements, and the full C expression
// grammar except compound literals and statement expressions. `#` lines are
// not executed. Function-pointer declarators, bit-fields, goto and labels
// raise UnsupportedConstruct.
//
// Common library typedefs (size_t, intN_t, uintN_t, FILE, ...) are known
// without their headers. Statements whose first token starts with `__mf_`
// are instrumentation probes and are left out of the statement index.
SourceUnit Parse(std::string_view source, std::string_view path);

struct Patch {
  ByteSpan span;
  std::string replacement;
};

// Without a patch returns the original bytes. With a patch the span must
// coincide with some AST node, else SpanMismatch.
std::string Render(const SourceUnit& unit, const std::optional<Patch>& patch = {});

// Applies several non-overlapping insertions/replacements; used by the
// instrumenter where edits do not align to single nodes.
struct Edit {
  std::size_t offset = 0;
  std::size_t length = 0;  // bytes replaced at offset
  std::string text;
};
std::string ApplyEdits(std::string_view text, std::vector<Edit> edits);

struct Parameter {
  std::string name;
  TypePtr type;
};

struct FunctionSignature {
  std::string name;
  TypePtr return_type;
  std::vector<Parameter> params;
  bool variadic = false;
  NodeId node = kNoNode;  // FunctionDef or Declaration
};

// One signature per function definition in source order; with
// `include_prototypes` bodiless declarations are listed too. Throws
// UnresolvedType when a parameter or return type is not defined in the unit.
std::vector<FunctionSignature> ExtractSignatures(const SourceUnit& unit,
                                                 bool include_prototypes = false);

std::optional<FunctionSignature> FindSignature(const SourceUnit& unit,
                                               std::string_view name);

// Text of a function definition's header up to (not including) its body,
// with `name` optionally replaced, terminated by ';'.
std::string PrototypeText(const SourceUnit& unit, NodeId function_def,
                          std::string_view rename = {});

// Top-level typedef/struct/union/enum declarations and preprocessor lines,
// in source order, for use as a preamble in generated sources.
std::string TypePreamble(const SourceUnit& unit);

// Debug dump of the tree, one node per line.
std::string DumpAst(const SourceUnit& unit);

}  // namespace mutafuzz::cfront

#endif  // MUTAFUZZ_CFRONT_FRONTEND_H_
