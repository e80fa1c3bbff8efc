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

#ifndef MUTAFUZZ_TESTS_SUPPORT_TEST_UTIL_H_
#define MUTAFUZZ_TESTS_SUPPORT_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

namespace mutafuzz::testing {

inline std::filesystem::path FixturePath(const std::string& name) {
  return std::filesystem::path(MUTAFUZZ_FIXTURE_DIR) / name;
}

inline std::vector<std::filesystem::path> CorpusFiles() {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(MUTAFUZZ_FIXTURE_DIR)) {
    if (entry.path().extension() == ".c") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mutafuzz::testing

#endif  // MUTAFUZZ_TESTS_SUPPORT_TEST_UTIL_H_
