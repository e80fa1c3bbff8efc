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

#ifndef MUTAFUZZ_COMMON_SUBPROCESS_H_
#define MUTAFUZZ_COMMON_SUBPROCESS_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mutafuzz {

struct ProcessSpec {
  std::vector<std::string> argv;
  std::filesystem::path cwd;  // empty: inherit
  std::map<std::string, std::string> env;  // added to / overriding environ
  std::chrono::milliseconds timeout{0};    // 0: no limit
  bool capture_output = false;             // stdout+stderr, else /dev/null
};

struct ProcessResult {
  bool spawned = false;
  bool timed_out = false;
  bool exited = false;
  int exit_code = -1;
  bool signaled = false;
  int signal = 0;
  std::string output;
  std::chrono::microseconds elapsed{0};

  bool Succeeded() const { return exited && exit_code == 0; }
};

// Runs a child in its own process group. On timeout the whole group gets
// SIGTERM, then SIGKILL after a short grace period so that coverage
// runtimes can flush their counters.
ProcessResult RunProcess(const ProcessSpec& spec);

// `/bin/sh -c command`.
ProcessResult RunShell(const std::string& command,
                       const std::filesystem::path& cwd,
                       std::chrono::milliseconds timeout,
                       const std::map<std::string, std::string>& env = {},
                       bool capture_output = true);

std::string DescribeProcessResult(const ProcessResult& result);

}  // namespace mutafuzz

#endif  // MUTAFUZZ_COMMON_SUBPROCESS_H_
