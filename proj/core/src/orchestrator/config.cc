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

#include "mutafuzz/orchestrator/config.h"

#include <charconv>
#include <map>
#include <set>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"

namespace mutafuzz::orchestrator {

namespace fs = std::filesystem;

std::string_view SamplingStrategyName(SamplingStrategy strategy) {
  switch (strategy) {
    case SamplingStrategy::kNone: return "none";
    case SamplingStrategy::kUniform: return "uniform";
    case SamplingStrategy::kMethod: return "method";
    case SamplingStrategy::kFixed: return "fixed";
    case SamplingStrategy::kFsci: return "fsci";
  }
  return "?";
}

std::optional<SamplingStrategy> ParseSamplingStrategy(std::string_view name) {
  for (SamplingStrategy s : {SamplingStrategy::kNone, SamplingStrategy::kUniform,
                             SamplingStrategy::kMethod, SamplingStrategy::kFixed,
                             SamplingStrategy::kFsci}) {
    if (SamplingStrategyName(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "workspace",       "sources",         "tests",          "tests.timeout_s",
      "build.cmd",       "build.artifact",  "build.levels",   "build.timeout_s",
      "sampling.strategy", "sampling.ratio", "sampling.n",    "sampling.width",
      "sampling.alpha",  "sampling.seed",   "fuzz.budget_s",  "fuzz.max_execs",
      "fuzz.seed",       "fuzz.exec_timeout_ms", "fuzz.cc",   "fuzz.kill_list",
      "fuzz.keep_going", "workers",         "report"};
  return keys;
}

[[noreturn]] void Bad(const std::string& key) { throw Error(ErrorCode::kBadValue, key); }

double Real(const std::map<std::string, std::string>& kv, const std::string& key,
            double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) Bad(key);
    return v;
  } catch (const std::logic_error&) {
    Bad(key);
  }
}

std::uint64_t Unsigned(const std::map<std::string, std::string>& kv, const std::string& key,
                       std::uint64_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::uint64_t v = 0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) Bad(key);
  return v;
}

std::vector<std::string> List(const std::string& value) {
  std::vector<std::string> out;
  for (const std::string& item : Split(value, ',')) {
    std::string trimmed = Trim(item);
    if (!trimmed.empty()) out.push_back(trimmed);
  }
  return out;
}

void MustExist(const fs::path& path, const std::string& key) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIoError, key + ": " + path.string() + " does not exist");
  }
}

}  // namespace

Config ParseConfig(std::string_view text, const fs::path& base_dir) {
  std::map<std::string, std::string> kv;
  for (const std::string& raw : SplitLines(text)) {
    std::string line = raw.substr(0, raw.find('#'));
    line = Trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kBadValue, line);
    const std::string key = Trim(line.substr(0, eq));
    if (!KnownKeys().count(key)) Bad(key);
    kv[key] = Trim(line.substr(eq + 1));
  }
  for (const char* required : {"sources", "tests", "build.cmd", "build.artifact"}) {
    if (!kv.count(required) || kv[required].empty()) {
      throw Error(ErrorCode::kMissingKey, required);
    }
  }

  Config config;
  config.workspace = fs::weakly_canonical(
      kv.count("workspace") ? base_dir / kv["workspace"] : base_dir);
  MustExist(config.workspace, "workspace");
  config.sources = List(kv["sources"]);
  if (config.sources.empty()) Bad("sources");
  for (const std::string& source : config.sources) {
    MustExist(config.workspace / source, "sources");
  }
  config.tests = config.workspace / kv["tests"];
  MustExist(config.tests, "tests");
  config.test_timeout = std::chrono::seconds(Unsigned(kv, "tests.timeout_s", 10));
  if (config.test_timeout.count() == 0) Bad("tests.timeout_s");

  config.build.command = kv["build.cmd"];
  config.build.artifact = kv["build.artifact"];
  if (kv.count("build.levels")) {
    config.build.levels = List(kv["build.levels"]);
    if (config.build.levels.empty()) Bad("build.levels");
  }
  config.build.timeout = std::chrono::seconds(Unsigned(kv, "build.timeout_s", 300));
  if (config.build.timeout.count() == 0) Bad("build.timeout_s");

  if (kv.count("sampling.strategy")) {
    auto strategy = ParseSamplingStrategy(kv["sampling.strategy"]);
    if (!strategy) Bad("sampling.strategy");
    config.sampling.strategy = *strategy;
  }
  config.sampling.ratio = Real(kv, "sampling.ratio", 1.0);
  if (!(config.sampling.ratio > 0.0 && config.sampling.ratio <= 1.0)) Bad("sampling.ratio");
  config.sampling.size = Unsigned(kv, "sampling.n", 0);
  if (config.sampling.strategy == SamplingStrategy::kFixed && !kv.count("sampling.n")) {
    throw Error(ErrorCode::kMissingKey, "sampling.n");
  }
  config.sampling.width = Real(kv, "sampling.width", 0.10);
  if (!(config.sampling.width > 0.0 && config.sampling.width < 1.0)) Bad("sampling.width");
  config.sampling.alpha = Real(kv, "sampling.alpha", 0.05);
  if (!(config.sampling.alpha > 0.0 && config.sampling.alpha < 1.0)) Bad("sampling.alpha");
  config.sampling.seed = Unsigned(kv, "sampling.seed", 1);

  config.fuzz.budget_s = Real(kv, "fuzz.budget_s", 10000.0);
  if (!(config.fuzz.budget_s >= 0.0)) Bad("fuzz.budget_s");
  config.fuzz.max_execs = Unsigned(kv, "fuzz.max_execs", UINT64_MAX);
  config.fuzz.seed = Unsigned(kv, "fuzz.seed", 1);
  config.fuzz.exec_timeout = std::chrono::milliseconds(Unsigned(kv, "fuzz.exec_timeout_ms", 1000));
  if (config.fuzz.exec_timeout.count() == 0) Bad("fuzz.exec_timeout_ms");
  if (kv.count("fuzz.cc")) config.fuzz.compiler = kv["fuzz.cc"];
  if (kv.count("fuzz.kill_list")) {
    config.fuzz.kill_list = config.workspace / kv["fuzz.kill_list"];
    MustExist(*config.fuzz.kill_list, "fuzz.kill_list");
  }
  if (kv.count("fuzz.keep_going")) {
    const std::string& v = kv["fuzz.keep_going"];
    if (v != "true" && v != "false") Bad("fuzz.keep_going");
    config.fuzz.keep_going = v == "true";
  }

  const std::uint64_t workers = Unsigned(kv, "workers", 1);
  if (workers == 0 || workers > 1024) Bad("workers");
  config.workers = static_cast<unsigned>(workers);
  config.report = kv.count("report") ? config.workspace / kv["report"]
                                     : config.workspace / ".mutafuzz" / "report.json";
  return config;
}

Config LoadConfig(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIoError, "no config file " + path.string());
  return ParseConfig(ReadFile(path), fs::absolute(path).parent_path());
}

}  // namespace mutafuzz::orchestrator
