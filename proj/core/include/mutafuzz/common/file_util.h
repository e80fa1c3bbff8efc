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

#ifndef MUTAFUZZ_COMMON_FILE_UTIL_H_
#define MUTAFUZZ_COMMON_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mutafuzz {

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);
// Writes to a sibling temporary and renames over the target.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> SplitLines(std::string_view text);
std::vector<std::string> Split(std::string_view text, char separator);
std::string Trim(std::string_view text);

// Backslash escaping for tab-separated manifests: \\, \t, \n, \r.
std::string EscapeField(std::string_view text);
std::string UnescapeField(std::string_view text);

std::string ToHex(std::string_view bytes);

// Removes the directory tree on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view prefix = "mutafuzz");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mutafuzz

#endif  // MUTAFUZZ_COMMON_FILE_UTIL_H_
