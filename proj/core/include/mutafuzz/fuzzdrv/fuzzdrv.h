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

#ifndef MUTAFUZZ_FUZZDRV_FUZZDRV_H_
#define MUTAFUZZ_FUZZDRV_FUZZDRV_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mutafuzz/cfront/frontend.h"
#include "mutafuzz/cfront/types.h"

namespace mutafuzz::fuzzdrv {

// Log sentinels written by generated drivers.
inline constexpr std::string_view kCallingOriginal = "Calling the original function";
inline constexpr std::string_view kCallingMutated = "Calling the mutated function";
inline constexpr std::string_view kComparing = "Comparing result values: ";
inline constexpr std::string_view kMutantKilled = "Mutant killed";
inline constexpr std::string_view kMutantAlive = "Mutant alive";
inline constexpr std::string_view kNothingToCompare = "Warning: nothing to compare";
// Name under which the return value is dumped and checked.
inline constexpr std::string_view kReturnName = "return";

struct Segment {
  std::string name;
  cfront::TypePtr type;  // the materialized value type (pointee for pointers)
  bool by_pointer = false;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Packed parameter values in declaration order; pointer parameters
// contribute their pointee.
struct InputLayout {
  std::vector<Segment> segments;
  std::size_t total_bytes = 0;
};

// Throws UnsupportedSignature for variadic functions, void pointers,
// pointers to pointers, unions and records with pointer or union members.
InputLayout ComputeLayout(const cfront::FunctionSignature& sig);

// A value for one segment: a number for scalars, a list of element values
// for arrays (one per element) and structs (one per member).
struct Value {
  std::variant<std::int64_t, std::uint64_t, double> scalar{std::int64_t{0}};
  std::vector<Value> elements;

  static Value Int(std::int64_t v) { return {v, {}}; }
  static Value UInt(std::uint64_t v) { return {v, {}}; }
  static Value Float(double v) { return {v, {}}; }
  static Value List(std::vector<Value> v) { return {std::int64_t{0}, std::move(v)}; }
  friend bool operator==(const Value&, const Value&) = default;
};

// Little-endian bytes at each segment's offset; padding bytes are zero.
// Throws RangeError when a value does not fit its type and LengthMismatch
// when the value count does not match.
std::string EncodeInput(const std::vector<Value>& values, const InputLayout& layout);
// Inverse of EncodeInput; short input is zero-extended.
std::vector<Value> DecodeInput(std::string_view bytes, const InputLayout& layout);

enum class SeedClass { kZero, kNegative, kPositive };

// The class value for one type: integers 0 / -100 / 100 (unsigned negative
// wraps to 2^N - 100), floats 0 / -3.5 / 3.5, chars 0 / 0x80 / 'a',
// bool 0 / 1 / 1, enums 0 / smallest / largest enumerator.
Value SeedValue(const cfront::TypeDescriptor& type, SeedClass seed_class);

// Seed i assigns class i to every parameter. A signature without
// parameters gets one empty seed.
std::vector<std::string> GenerateSeeds(const InputLayout& layout);

// Text of the definition of `name` with every occurrence of the name
// inside it replaced by `prefix + name`.
std::string RenamedFunction(const cfront::SourceUnit& unit, std::string_view name,
                            std::string_view prefix = "mut_");

// Code placed before a driver's main: normally the subject translation unit
// (with its own main renamed away) and the renamed mutant function.
std::string DriverPrelude(std::string_view subject_include, std::string_view mutant_function);

// Differential driver: reads every parameter twice from the same bytes,
// calls the original and `mut_<name>`, compares all parameters and the
// return value and aborts on a difference.
std::string GenerateDriver(const cfront::FunctionSignature& sig, std::string_view prelude);

// Same shape, but both calls go to the original function.
std::string GenerateNondetDriver(const cfront::FunctionSignature& sig,
                                 std::string_view prelude);

// Runs the original once and writes every parameter and the return value
// with dump_value, for building a regression test.
std::string GenerateCaptureDriver(const cfront::FunctionSignature& sig,
                                  std::string_view prelude);

// Parses "<name> <hex>" lines written by dump_value.
std::map<std::string, std::string> ParseDump(std::string_view text);

// Standalone test: the killing input as a byte array, one call of the
// original function, and a byte comparison of every output with the
// captured expectation. Exits 0 on a match, 1 with a diff otherwise.
// `prelude` must declare the function and its types.
std::string GenerateUnitTest(const cfront::FunctionSignature& sig, std::string_view prelude,
                             std::string_view killing_input,
                             const std::map<std::string, std::string>& expected);

}  // namespace mutafuzz::fuzzdrv

#endif  // MUTAFUZZ_FUZZDRV_FUZZDRV_H_
