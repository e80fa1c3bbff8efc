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

#ifndef MUTAFUZZ_COMMON_RUNTIME_SOURCES_H_
#define MUTAFUZZ_COMMON_RUNTIME_SOURCES_H_

#include <filesystem>
#include <string_view>

namespace mutafuzz {

// C sources compiled into instrumented subjects and fuzzing drivers. They
// are embedded in the library so a run needs no install tree.
inline constexpr std::string_view kCoverageHeaderName = "mutafuzz_cov.h";
inline constexpr std::string_view kRuntimeHeaderName = "mutafuzz_rt.h";
inline constexpr std::string_view kRuntimeSourceName = "mutafuzz_rt.c";

std::string_view CoverageHeaderSource();
std::string_view RuntimeHeaderSource();
std::string_view RuntimeSource();

// Writes the three files into `dir` (created if needed).
void WriteRuntimeFiles(const std::filesystem::path& dir);

}  // namespace mutafuzz

#endif  // MUTAFUZZ_COMMON_RUNTIME_SOURCES_H_
