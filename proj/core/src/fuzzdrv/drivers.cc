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

#include <cstdio>
#include <sstream>

#include "mutafuzz/common/error.h"
#include "mutafuzz/fuzzdrv/fuzzdrv.h"

namespace mutafuzz::fuzzdrv {

using cfront::TypeDescriptor;
using cfront::TypeKind;

namespace {

bool HasReturn(const cfront::FunctionSignature& sig) {
  return sig.return_type && sig.return_type->kind != TypeKind::kVoid;
}

bool ReturnsPointer(const cfront::FunctionSignature& sig) {
  return HasReturn(sig) && sig.return_type->kind == TypeKind::kPointer;
}

std::string Var(std::string_view prefix, std::string_view name) {
  return std::string(prefix) + "_" + std::string(name);
}

std::string CallArgs(const InputLayout& layout, std::string_view prefix) {
  std::string out;
  for (const Segment& s : layout.segments) {
    if (!out.empty()) out += ", ";
    if (s.by_pointer) out += "&";
    out += Var(prefix, s.name);
  }
  return out;
}

void DeclareAll(std::ostringstream& os, const cfront::FunctionSignature& sig,
                const InputLayout& layout, std::string_view prefix) {
  for (const Segment& s : layout.segments) {
    os << "  " << cfront::DeclareVariable(*s.type, Var(prefix, s.name)) << ";\n";
  }
  if (HasReturn(sig)) {
    os << "  " << cfront::DeclareVariable(*sig.return_type, Var(prefix, "return")) << ";\n";
  }
}

void ReadAll(std::ostringstream& os, const InputLayout& layout, std::string_view prefix) {
  for (const Segment& s : layout.segments) {
    const std::string v = Var(prefix, s.name);
    os << "  get_value(&" << v << ", sizeof(" << v << "), 0);\n";
  }
}

void Call(std::ostringstream& os, const cfront::FunctionSignature& sig,
          const InputLayout& layout, std::string_view callee, std::string_view prefix) {
  os << "  ";
  if (HasReturn(sig)) os << Var(prefix, "return") << " = ";
  os << callee << "(" << CallArgs(layout, prefix) << ");\n";
}

void RequiredSize(std::ostringstream& os, const InputLayout& layout) {
  os << "unsigned long mutafuzz_required_size = " << layout.total_bytes << "UL;\n\n";
}

std::string Hex(std::string_view bytes) {
  std::string out;
  char buf[16];
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s0x%02x", i == 0 ? "" : (i % 12 == 0 ? ",\n  " : ", "),
                  static_cast<unsigned char>(bytes[i]));
    out += buf;
  }
  return out;
}

std::string Differential(const cfront::FunctionSignature& sig, std::string_view prelude,
                         std::string_view second_callee, bool warn_if_empty) {
  const InputLayout layout = ComputeLayout(sig);
  std::ostringstream os;
  os << prelude;
  if (!prelude.empty() && prelude.back() != '\n') os << "\n";
  os << "\n";
  RequiredSize(os, layout);
  os << "int main(int argc, char** argv) {\n";
  DeclareAll(os, sig, layout, "origin");
  DeclareAll(os, sig, layout, "mut");
  os << "  int ret = 0;\n";
  os << "  if (argc < 2) return 2;\n";
  os << "  load_file(argv[1]);\n";
  ReadAll(os, layout, "origin");
  os << "  log(\"" << kCallingOriginal << "\");\n";
  Call(os, sig, layout, sig.name, "origin");
  os << "  seek_data_index(0);\n";
  ReadAll(os, layout, "mut");
  os << "  log(\"" << kCallingMutated << "\");\n";
  Call(os, sig, layout, second_callee, "mut");
  os << "  log(\"" << kComparing << "\");\n";
  bool compared = false;
  for (const Segment& s : layout.segments) {
    const std::string o = Var("origin", s.name);
    os << "  ret += compare_value(&" << o << ", &" << Var("mut", s.name) << ", sizeof(" << o
       << "));\n";
    // Values passed by copy cannot carry a difference back.
    if (s.by_pointer || s.type->kind == TypeKind::kArray) compared = true;
  }
  if (ReturnsPointer(sig)) {
    os << "  {\n"
       << "    int origin_null = origin_return == 0;\n"
       << "    int mut_null = mut_return == 0;\n"
       << "    ret += compare_value(&origin_null, &mut_null, sizeof(origin_null));\n"
       << "  }\n";
    compared = true;
  } else if (HasReturn(sig)) {
    os << "  ret += compare_value(&origin_return, &mut_return, sizeof(origin_return));\n";
    compared = true;
  }
  if (!compared && warn_if_empty) os << "  log(\"" << kNothingToCompare << "\");\n";
  os << "  if (ret != 0) {\n"
     << "    log(\"" << kMutantKilled << "\");\n"
     << "    safe_abort();\n"
     << "  }\n"
     << "  log(\"" << kMutantAlive << "\");\n"
     << "  return 0;\n"
     << "}\n";
  return os.str();
}

}  // namespace

std::string RenamedFunction(const cfront::SourceUnit& unit, std::string_view name,
                            std::string_view prefix) {
  for (cfront::NodeId def : unit.FunctionDefinitions()) {
    if (unit.FunctionName(def) != name) continue;
    const cfront::Node& n = unit.node(def);
    std::vector<cfront::Edit> edits;
    for (std::size_t t = n.first_token; t < n.end_token; ++t) {
      const cfront::Token& token = unit.tokens[t];
      if (token.kind != cfront::TokenKind::kIdentifier || token.lexeme != name) continue;
      edits.push_back({token.span.begin - n.span.begin, 0, std::string(prefix)});
    }
    return cfront::ApplyEdits(unit.Text(n.span), std::move(edits)) + "\n";
  }
  throw Error(ErrorCode::kUnknownStatement, "no definition of " + std::string(name) + " in " +
                                                unit.path);
}

std::string DriverPrelude(std::string_view subject_include, std::string_view mutant_function) {
  std::string out = "#define main mutafuzz_subject_main\n#include \"";
  out += subject_include;
  out += "\"\n#undef main\n\n";
  out += mutant_function;
  if (!mutant_function.empty() && mutant_function.back() != '\n') out += "\n";
  out += "\n#include \"mutafuzz_rt.h\"\n";
  return out;
}

std::string GenerateDriver(const cfront::FunctionSignature& sig, std::string_view prelude) {
  return Differential(sig, prelude, "mut_" + sig.name, false);
}

std::string GenerateNondetDriver(const cfront::FunctionSignature& sig,
                                 std::string_view prelude) {
  return Differential(sig, prelude, sig.name, true);
}

std::string GenerateCaptureDriver(const cfront::FunctionSignature& sig,
                                  std::string_view prelude) {
  const InputLayout layout = ComputeLayout(sig);
  std::ostringstream os;
  os << prelude;
  if (!prelude.empty() && prelude.back() != '\n') os << "\n";
  os << "\n";
  RequiredSize(os, layout);
  os << "int main(int argc, char** argv) {\n";
  DeclareAll(os, sig, layout, "origin");
  os << "  if (argc < 2) return 2;\n";
  os << "  load_file(argv[1]);\n";
  ReadAll(os, layout, "origin");
  Call(os, sig, layout, sig.name, "origin");
  for (const Segment& s : layout.segments) {
    const std::string o = Var("origin", s.name);
    os << "  dump_value(\"" << s.name << "\", &" << o << ", sizeof(" << o << "));\n";
  }
  if (ReturnsPointer(sig)) {
    os << "  {\n"
       << "    int origin_null = origin_return == 0;\n"
       << "    dump_value(\"" << kReturnName
       << "\", &origin_null, sizeof(origin_null));\n"
       << "  }\n";
  } else if (HasReturn(sig)) {
    os << "  dump_value(\"" << kReturnName
       << "\", &origin_return, sizeof(origin_return));\n";
  }
  os << "  return 0;\n}\n";
  return os.str();
}

std::map<std::string, std::string> ParseDump(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t space = line.find(' ');
    const std::string name = line.substr(0, space);
    const std::string hex = space == std::string::npos ? "" : line.substr(space + 1);
    if (hex.size() % 2 != 0) throw Error(ErrorCode::kFormatError, "odd hex length: " + line);
    std::string bytes;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
      unsigned value = 0;
      if (std::sscanf(hex.c_str() + i, "%2x", &value) != 1) {
        throw Error(ErrorCode::kFormatError, "bad hex: " + line);
      }
      bytes.push_back(static_cast<char>(value));
    }
    out[name] = bytes;
  }
  return out;
}

std::string GenerateUnitTest(const cfront::FunctionSignature& sig, std::string_view prelude,
                             std::string_view killing_input,
                             const std::map<std::string, std::string>& expected) {
  const InputLayout layout = ComputeLayout(sig);
  std::ostringstream os;
  os << "#include <stdio.h>\n#include <string.h>\n\n";
  os << prelude;
  if (!prelude.empty() && prelude.back() != '\n') os << "\n";
  os << "\n";
  os << "static const unsigned char kInput[] = {\n  "
     << (killing_input.empty() ? "0" : Hex(killing_input)) << "\n};\n";
  os << "static const unsigned long kInputLength = " << killing_input.size() << "UL;\n";
  std::vector<std::pair<std::string, std::string>> checks;
  for (const auto& [name, bytes] : expected) {
    const std::string array = "kExpect_" + name;
    os << "static const unsigned char " << array << "[] = {\n  "
       << (bytes.empty() ? "0" : Hex(bytes)) << "\n};\n";
    checks.emplace_back(name, array);
  }
  os << R"(
static int Check(const char* name, const void* actual, const unsigned char* expected,
                 unsigned long size) {
  const unsigned char* bytes = (const unsigned char*)actual;
  unsigned long i;
  if (memcmp(actual, expected, size) == 0) return 0;
  printf("%s differs\n  expected:", name);
  for (i = 0; i < size; ++i) printf(" %02x", expected[i]);
  printf("\n  actual:  ");
  for (i = 0; i < size; ++i) printf(" %02x", bytes[i]);
  printf("\n");
  return 1;
}

)";
  os << "int main(void) {\n";
  os << "  unsigned char buffer[" << (layout.total_bytes == 0 ? 1 : layout.total_bytes)
     << "];\n";
  DeclareAll(os, sig, layout, "origin");
  os << "  int failures = 0;\n";
  os << "  memset(buffer, 0, sizeof(buffer));\n";
  os << "  memcpy(buffer, kInput, kInputLength < " << layout.total_bytes << "UL ? kInputLength : "
     << layout.total_bytes << "UL);\n";
  for (const Segment& s : layout.segments) {
    const std::string o = Var("origin", s.name);
    os << "  memcpy(&" << o << ", buffer + " << s.offset << ", sizeof(" << o << "));\n";
  }
  Call(os, sig, layout, sig.name, "origin");
  if (ReturnsPointer(sig)) os << "  {\n    int origin_null = origin_return == 0;\n";
  for (const auto& [name, array] : checks) {
    std::string actual;
    if (name == kReturnName) {
      actual = ReturnsPointer(sig) ? "origin_null" : "origin_return";
    } else {
      actual = Var("origin", name);
    }
    os << "  failures += Check(\"" << name << "\", &" << actual << ", " << array << ", sizeof("
       << actual << "));\n";
  }
  if (ReturnsPointer(sig)) os << "  }\n";
  os << "  if (failures != 0) {\n"
     << "    printf(\"FAILED: %d output(s) differ\\n\", failures);\n"
     << "    return 1;\n"
     << "  }\n"
     << "  printf(\"PASSED\\n\");\n"
     << "  return 0;\n"
     << "}\n";
  return os.str();
}

}  // namespace mutafuzz::fuzzdrv
