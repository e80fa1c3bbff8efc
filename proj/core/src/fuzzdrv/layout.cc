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
#include <cmath>
#include <cstring>
#include <limits>

#include "mutafuzz/common/error.h"
#include "mutafuzz/fuzzdrv/fuzzdrv.h"

namespace mutafuzz::fuzzdrv {

using cfront::TypeDescriptor;
using cfront::TypeKind;

namespace {

[[noreturn]] void Unsupported(const std::string& what) {
  throw Error(ErrorCode::kUnsupportedSignature, what);
}

// Value types must be plain bytes: no pointers or unions inside.
void CheckMaterializable(const TypeDescriptor& type, const std::string& where) {
  switch (type.kind) {
    case TypeKind::kPointer:
      Unsupported(where + ": pointer inside a materialized value");
    case TypeKind::kUnion:
      Unsupported(where + ": union");
    case TypeKind::kFunction:
      Unsupported(where + ": function pointer");
    case TypeKind::kVoid:
      Unsupported(where + ": void value");
    case TypeKind::kUnresolved:
      Unsupported(where + ": unresolved type " + type.tag);
    case TypeKind::kStruct:
      if (!type.complete) Unsupported(where + ": incomplete struct " + type.tag);
      for (const auto& member : type.members) {
        CheckMaterializable(*member.type, where + "." + member.name);
      }
      return;
    case TypeKind::kArray:
      CheckMaterializable(*type.pointee, where + "[]");
      return;
    default:
      return;
  }
}

void PutLe(std::string& out, std::size_t at, std::uint64_t value, std::size_t bytes) {
  for (std::size_t i = 0; i < bytes; ++i) {
    out[at + i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
}

std::uint64_t GetLe(std::string_view in, std::size_t at, std::size_t bytes) {
  std::uint64_t value = 0;
  for (std::size_t i = bytes; i-- > 0;) {
    value = (value << 8) | static_cast<unsigned char>(in[at + i]);
  }
  return value;
}

bool IsSignedScalar(const TypeDescriptor& type) {
  switch (type.kind) {
    case TypeKind::kSignedInt:
    case TypeKind::kEnum:
      return true;
    case TypeKind::kChar:
      return type.is_signed;
    default:
      return false;
  }
}

[[noreturn]] void OutOfRange(const TypeDescriptor& type, const std::string& shown) {
  throw Error(ErrorCode::kRangeError, shown + " does not fit " + type.spelling);
}

void Encode(const TypeDescriptor& type, const Value& value, std::string& out, std::size_t at) {
  switch (type.kind) {
    case TypeKind::kStruct: {
      if (value.elements.size() != type.members.size()) {
        throw Error(ErrorCode::kLengthMismatch, type.spelling + " needs " +
                                                    std::to_string(type.members.size()) +
                                                    " member values");
      }
      for (std::size_t i = 0; i < type.members.size(); ++i) {
        Encode(*type.members[i].type, value.elements[i], out, at + type.members[i].offset);
      }
      return;
    }
    case TypeKind::kArray: {
      if (value.elements.size() != type.array_length) {
        throw Error(ErrorCode::kLengthMismatch, type.spelling + " needs " +
                                                    std::to_string(type.array_length) +
                                                    " elements");
      }
      const std::size_t step = type.pointee->size_bytes;
      for (std::size_t i = 0; i < type.array_length; ++i) {
        Encode(*type.pointee, value.elements[i], out, at + i * step);
      }
      return;
    }
    case TypeKind::kFloat: {
      double v = 0;
      if (auto* d = std::get_if<double>(&value.scalar)) v = *d;
      else if (auto* i = std::get_if<std::int64_t>(&value.scalar)) v = static_cast<double>(*i);
      else v = static_cast<double>(std::get<std::uint64_t>(value.scalar));
      if (type.size_bytes == 4) {
        const float f = static_cast<float>(v);
        if (std::isfinite(v) && !std::isfinite(f)) OutOfRange(type, std::to_string(v));
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        PutLe(out, at, bits, 4);
      } else if (type.size_bytes == 8) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        PutLe(out, at, bits, 8);
      } else {
        const long double lv = v;
        std::memcpy(&out[at], &lv, std::min(type.size_bytes, sizeof(lv)));
      }
      return;
    }
    case TypeKind::kSignedInt:
    case TypeKind::kUnsignedInt:
    case TypeKind::kChar:
    case TypeKind::kBool:
    case TypeKind::kEnum: {
      if (std::holds_alternative<double>(value.scalar)) {
        throw Error(ErrorCode::kRangeError, "floating value for integral " + type.spelling);
      }
      const std::size_t bits = type.size_bytes * 8;
      std::uint64_t raw;
      if (type.kind == TypeKind::kBool) {
        const bool neg = std::holds_alternative<std::int64_t>(value.scalar) &&
                         std::get<std::int64_t>(value.scalar) < 0;
        const std::uint64_t v = neg ? 2 : std::visit([](auto x) {
          return static_cast<std::uint64_t>(x);
        }, value.scalar);
        if (v > 1) OutOfRange(type, std::to_string(v));
        raw = v;
      } else if (IsSignedScalar(type)) {
        std::int64_t v;
        if (auto* u = std::get_if<std::uint64_t>(&value.scalar)) {
          if (*u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            OutOfRange(type, std::to_string(*u));
          }
          v = static_cast<std::int64_t>(*u);
        } else {
          v = std::get<std::int64_t>(value.scalar);
        }
        if (bits < 64) {
          const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;
          const std::int64_t lo = -hi - 1;
          if (v < lo || v > hi) OutOfRange(type, std::to_string(v));
        }
        raw = static_cast<std::uint64_t>(v);
      } else {
        std::uint64_t v;
        if (auto* i = std::get_if<std::int64_t>(&value.scalar)) {
          if (*i < 0) OutOfRange(type, std::to_string(*i));
          v = static_cast<std::uint64_t>(*i);
        } else {
          v = std::get<std::uint64_t>(value.scalar);
        }
        if (bits < 64 && v >> bits) OutOfRange(type, std::to_string(v));
        raw = v;
      }
      PutLe(out, at, raw, type.size_bytes);
      return;
    }
    default:
      Unsupported("cannot encode " + type.spelling);
  }
}

Value Decode(const TypeDescriptor& type, std::string_view in, std::size_t at) {
  switch (type.kind) {
    case TypeKind::kStruct: {
      std::vector<Value> members;
      for (const auto& member : type.members) {
        members.push_back(Decode(*member.type, in, at + member.offset));
      }
      return Value::List(std::move(members));
    }
    case TypeKind::kArray: {
      std::vector<Value> elements;
      for (std::size_t i = 0; i < type.array_length; ++i) {
        elements.push_back(Decode(*type.pointee, in, at + i * type.pointee->size_bytes));
      }
      return Value::List(std::move(elements));
    }
    case TypeKind::kFloat: {
      if (type.size_bytes == 4) {
        const auto bits = static_cast<std::uint32_t>(GetLe(in, at, 4));
        float f;
        std::memcpy(&f, &bits, 4);
        return Value::Float(f);
      }
      if (type.size_bytes == 8) {
        const std::uint64_t bits = GetLe(in, at, 8);
        double d;
        std::memcpy(&d, &bits, 8);
        return Value::Float(d);
      }
      long double lv = 0;
      std::memcpy(&lv, in.data() + at, std::min(type.size_bytes, sizeof(lv)));
      return Value::Float(static_cast<double>(lv));
    }
    default: {
      const std::size_t bits = type.size_bytes * 8;
      const std::uint64_t raw = GetLe(in, at, type.size_bytes);
      if (IsSignedScalar(type)) {
        std::int64_t v = static_cast<std::int64_t>(raw);
        if (bits < 64 && (raw >> (bits - 1)) & 1) {
          v = static_cast<std::int64_t>(raw | (~std::uint64_t{0} << bits));
        }
        return Value::Int(v);
      }
      return Value::UInt(raw);
    }
  }
}

}  // namespace

InputLayout ComputeLayout(const cfront::FunctionSignature& sig) {
  if (sig.variadic) Unsupported(sig.name + ": variadic function");
  InputLayout layout;
  for (const auto& param : sig.params) {
    const TypeDescriptor& type = *param.type;
    Segment segment;
    segment.name = param.name;
    if (type.kind == TypeKind::kPointer) {
      const TypeDescriptor& pointee = *type.pointee;
      if (pointee.kind == TypeKind::kVoid) Unsupported(param.name + ": void pointer");
      if (pointee.kind == TypeKind::kPointer) Unsupported(param.name + ": pointer to pointer");
      if (pointee.kind == TypeKind::kFunction) Unsupported(param.name + ": function pointer");
      segment.type = type.pointee;
      segment.by_pointer = true;
    } else {
      segment.type = param.type;
    }
    CheckMaterializable(*segment.type, param.name);
    if (segment.type->size_bytes == 0) Unsupported(param.name + ": value of unknown size");
    segment.offset = layout.total_bytes;
    segment.size = segment.type->size_bytes;
    layout.total_bytes += segment.size;
    layout.segments.push_back(std::move(segment));
  }
  if (sig.return_type) {
    const TypeDescriptor& ret = *sig.return_type;
    if (ret.kind == TypeKind::kUnion) Unsupported(sig.name + ": union return value");
    if (ret.kind == TypeKind::kStruct) CheckMaterializable(ret, "return value");
  }
  return layout;
}

std::string EncodeInput(const std::vector<Value>& values, const InputLayout& layout) {
  if (values.size() != layout.segments.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(values.size()) + " values for " +
                                                std::to_string(layout.segments.size()) +
                                                " parameters");
  }
  std::string out(layout.total_bytes, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    Encode(*layout.segments[i].type, values[i], out, layout.segments[i].offset);
  }
  return out;
}

std::vector<Value> DecodeInput(std::string_view bytes, const InputLayout& layout) {
  std::string padded(bytes.substr(0, std::min(bytes.size(), layout.total_bytes)));
  padded.resize(layout.total_bytes, '\0');
  std::vector<Value> out;
  for (const Segment& segment : layout.segments) {
    out.push_back(Decode(*segment.type, padded, segment.offset));
  }
  return out;
}

Value SeedValue(const TypeDescriptor& type, SeedClass seed_class) {
  switch (type.kind) {
    case TypeKind::kStruct: {
      std::vector<Value> members;
      for (const auto& member : type.members) {
        members.push_back(SeedValue(*member.type, seed_class));
      }
      return Value::List(std::move(members));
    }
    case TypeKind::kArray:
      return Value::List(
          std::vector<Value>(type.array_length, SeedValue(*type.pointee, seed_class)));
    case TypeKind::kFloat:
      return Value::Float(seed_class == SeedClass::kZero       ? 0.0
                          : seed_class == SeedClass::kNegative ? -3.5
                                                               : 3.5);
    case TypeKind::kBool:
      return Value::UInt(seed_class == SeedClass::kZero ? 0 : 1);
    case TypeKind::kChar:
      if (seed_class == SeedClass::kZero) return Value::Int(0);
      if (seed_class == SeedClass::kPositive) return Value::Int('a');
      return type.is_signed ? Value::Int(-128) : Value::Int(0x80);
    case TypeKind::kEnum: {
      if (seed_class == SeedClass::kZero || type.enumerators.empty()) return Value::Int(0);
      auto [lo, hi] = std::minmax_element(
          type.enumerators.begin(), type.enumerators.end(),
          [](const auto& a, const auto& b) { return a.value < b.value; });
      return Value::Int(seed_class == SeedClass::kNegative ? lo->value : hi->value);
    }
    case TypeKind::kUnsignedInt: {
      if (seed_class == SeedClass::kZero) return Value::UInt(0);
      if (seed_class == SeedClass::kPositive) return Value::UInt(100);
      const std::size_t bits = type.size_bytes * 8;
      const std::uint64_t max = bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
      return Value::UInt(max - 99);
    }
    default:
      return Value::Int(seed_class == SeedClass::kZero       ? 0
                        : seed_class == SeedClass::kNegative ? -100
                                                             : 100);
  }
}

std::vector<std::string> GenerateSeeds(const InputLayout& layout) {
  if (layout.segments.empty()) return {std::string()};
  std::vector<std::string> seeds;
  for (SeedClass c : {SeedClass::kZero, SeedClass::kNegative, SeedClass::kPositive}) {
    std::vector<Value> values;
    for (const Segment& segment : layout.segments) values.push_back(SeedValue(*segment.type, c));
    seeds.push_back(EncodeInput(values, layout));
  }
  return seeds;
}

}  // namespace mutafuzz::fuzzdrv
