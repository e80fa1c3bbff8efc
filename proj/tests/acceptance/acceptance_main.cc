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

// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any failed. `--skip-e2e` leaves out the slow end-to-end run; `--only
// <name>` runs a single criterion.

#include <cstdio>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "checks.h"

namespace {

using mutafuzz::acceptance::CheckResult;

struct Criterion {
  const char* name;
  const char* tier;
  CheckResult (*run)();
};

const std::vector<Criterion>& Criteria() {
  using namespace mutafuzz::acceptance;
  static const std::vector<Criterion> criteria = {
      {"clopper-pearson-oracle", "primary", CheckClopperPearson},
      {"fsci-stopping-point", "primary", CheckFsciStopping},
      {"cosine-and-test-order", "primary", CheckCosineAndOrder},
      {"tce-partition", "primary", CheckTcePartition},
      {"operator-tables", "primary", CheckOperatorTables},
      {"driver-and-seed-golden", "primary", CheckDriverAndSeeds},
      {"mutation-score", "primary", CheckScore},
      {"runtime-semantics", "secondary", CheckRuntimeSemantics},
      {"end-to-end-kill", "secondary", CheckEndToEnd},
  };
  return criteria;
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_e2e = false;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--skip-e2e") == 0) {
      skip_e2e = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--skip-e2e] [--only <criterion>]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  int ran = 0;
  for (const Criterion& c : Criteria()) {
    if (!only.empty() && only != c.name) continue;
    if (skip_e2e && std::strcmp(c.name, "end-to-end-kill") == 0) continue;
    CheckResult result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    ++ran;
    if (!result.pass) ++failed;
    std::printf("%s [%s] %s: %s\n", result.pass ? "PASS" : "FAIL", c.tier, c.name,
                result.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion named %s\n", only.c_str());
    return 2;
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
