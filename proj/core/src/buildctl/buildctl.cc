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

#include "mutafuzz/buildctl/buildctl.h"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <csignal>
#include <cstring>
#include <mutex>
#include <numeric>
#include <sstream>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/common/subprocess.h"

namespace mutafuzz::buildctl {
namespace fs = std::filesystem;

std::string Sha512Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha512(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-512 computation failed");
  }
  return ToHex(std::string_view(reinterpret_cast<const char*>(digest), length));
}

std::string Sha512File(const fs::path& path) { return Sha512Hex(ReadFile(path)); }

const std::vector<std::string>& DefaultLevels() {
  static const std::vector<std::string> levels = {"O0", "O1", "O2", "O3", "Ofast", "Os"};
  return levels;
}

bool BuildOutcome::AnyFailed() const {
  return std::any_of(per_level.begin(), per_level.end(),
                     [](const auto& entry) { return !entry.second.ok; });
}

namespace {

std::mutex g_build_mutex;

// Swap in flight, restored by the signal handler if the process is
// interrupted mid-build.
volatile std::sig_atomic_t g_pending = 0;
char g_pending_path[4096];
const char* g_pending_data = nullptr;
std::size_t g_pending_size = 0;
struct sigaction g_previous_int;
struct sigaction g_previous_term;

void RestoreOnSignal(int sig) {
  if (g_pending) {
    int fd = ::open(g_pending_path, O_WRONLY | O_TRUNC);
    if (fd >= 0) {
      std::size_t written = 0;
      while (written < g_pending_size) {
        ssize_t n = ::write(fd, g_pending_data + written, g_pending_size - written);
        if (n <= 0) break;
        written += static_cast<std::size_t>(n);
      }
      ::close(fd);
    }
    g_pending = 0;
  }
  struct sigaction& previous = sig == SIGINT ? g_previous_int : g_previous_term;
  ::sigaction(sig, &previous, nullptr);
  ::raise(sig);
}

void InstallSignalHandlersOnce() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction action {};
    action.sa_handler = RestoreOnSignal;
    sigemptyset(&action.sa_mask);
    ::sigaction(SIGINT, &action, &g_previous_int);
    ::sigaction(SIGTERM, &action, &g_previous_term);
  });
}

class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fs::create_directories(path.parent_path());
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kIoError, "cannot open lock " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) throw Error(ErrorCode::kIoError, "flock failed");
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

fs::path StateDir(const fs::path& root) { return root / ".mutafuzz"; }
fs::path BackupDir(const fs::path& root) { return StateDir(root) / "backup"; }

std::string FromHex(std::string_view hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<char>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16)));
  }
  return out;
}

// Holds a swapped file and puts the original bytes back when destroyed.
class SwapGuard {
 public:
  SwapGuard(const fs::path& root, const fs::path& relative, std::string original,
            const std::string& mutated)
      : target_(root / relative),
        backup_(BackupDir(root) / ToHex(relative.generic_string())),
        original_(std::move(original)) {
    WriteFileAtomic(backup_, original_);
    const std::string path = target_.string();
    if (path.size() >= sizeof(g_pending_path)) {
      throw Error(ErrorCode::kIoError, "path too long: " + path);
    }
    std::memcpy(g_pending_path, path.c_str(), path.size() + 1);
    g_pending_data = original_.data();
    g_pending_size = original_.size();
    g_pending = 1;
    WriteFile(target_, mutated);
  }
  ~SwapGuard() {
    try {
      WriteFileAtomic(target_, original_);
      g_pending = 0;
      fs::remove(backup_);
    } catch (...) {
      // The backup stays on disk for RecoverBackups.
    }
  }
  SwapGuard(const SwapGuard&) = delete;
  SwapGuard& operator=(const SwapGuard&) = delete;

 private:
  fs::path target_;
  fs::path backup_;
  std::string original_;
};

std::string FirstDiagnostic(const std::string& output) {
  for (const std::string& line : SplitLines(output)) {
    if (line.find("error") != std::string::npos) return Trim(line);
  }
  for (const std::string& line : SplitLines(output)) {
    if (!Trim(line).empty()) return Trim(line);
  }
  return {};
}

}  // namespace

Workspace::Workspace(fs::path root, BuildConfig config)
    : root_(fs::absolute(std::move(root))), config_(std::move(config)) {
  if (!fs::is_directory(root_)) {
    throw Error(ErrorCode::kIoError, "workspace is not a directory: " + root_.string());
  }
  if (config_.levels.empty()) throw Error(ErrorCode::kBadValue, "no build levels");
  RecoverBackups(root_);
}

int Workspace::RecoverBackups(const fs::path& root) {
  const fs::path dir = BackupDir(root);
  if (!fs::is_directory(dir)) return 0;
  int restored = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path relative = FromHex(entry.path().filename().string());
    WriteFileAtomic(root / relative, ReadFile(entry.path()));
    fs::remove(entry.path());
    ++restored;
  }
  return restored;
}

std::string Workspace::Baseline(const fs::path& file) {
  auto it = baselines_.find(file);
  const std::string current = Sha512File(root_ / file);
  if (it == baselines_.end()) {
    baselines_[file] = current;
    return current;
  }
  if (it->second != current) {
    throw Error(ErrorCode::kWorkspaceDirty,
                (root_ / file).string() + " changed since it was first recorded");
  }
  return current;
}

LevelResult Workspace::Build(const std::string& level,
                             const std::optional<SourceSwap>& swap) {
  std::lock_guard<std::mutex> in_process(g_build_mutex);
  FileLock lock(StateDir(root_) / "lock");
  InstallSignalHandlersOnce();

  std::optional<SwapGuard> guard;
  if (swap) {
    if (swap->file.is_absolute()) {
      throw Error(ErrorCode::kBadValue, "swap path must be relative: " + swap->file.string());
    }
    Baseline(swap->file);
    guard.emplace(root_, swap->file, ReadFile(root_ / swap->file), swap->contents);
  }

  std::string command = config_.command;
  for (std::size_t at = command.find("{level}"); at != std::string::npos;
       at = command.find("{level}", at + level.size())) {
    command.replace(at, 7, level);
  }
  const fs::path artifact = root_ / config_.artifact;
  std::error_code ignored;
  fs::remove(artifact, ignored);

  ProcessResult run = RunShell(command, root_, config_.timeout);
  LevelResult result;
  if (run.timed_out) {
    throw Error(ErrorCode::kTimeout, "build at " + level + " exceeded " +
                                         std::to_string(config_.timeout.count()) + " s");
  }
  if (run.exited && run.exit_code == 127) {
    throw Error(ErrorCode::kBuildToolMissing, FirstDiagnostic(run.output));
  }
  if (!run.Succeeded()) {
    result.exit_code = run.exited ? run.exit_code : 128 + run.signal;
    result.diagnostic = FirstDiagnostic(run.output);
    return result;
  }
  if (!fs::exists(artifact)) {
    result.exit_code = 0;
    result.diagnostic = "artifact not produced: " + config_.artifact;
    return result;
  }
  result.ok = true;
  result.digest = Sha512File(artifact);
  return result;
}

BuildOutcome Workspace::BuildAllLevels(const std::string& id,
                                       const std::optional<SourceSwap>& swap) {
  BuildOutcome outcome;
  outcome.id = id;
  for (const std::string& level : config_.levels) {
    outcome.per_level[level] = Build(level, swap);
  }
  return outcome;
}

bool Workspace::CheckDeterminism() {
  const std::string& level = config_.levels.front();
  LevelResult first = Build(level);
  LevelResult second = Build(level);
  return first.ok && second.ok && first.digest == second.digest;
}

bool NaturalLess(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ei = i, ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      std::string_view na = a.substr(i, ei - i);
      std::string_view nb = b.substr(j, ej - j);
      while (na.size() > 1 && na[0] == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb[0] == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

std::string TcePartition::Representative(const std::set<std::string>& group) {
  return *std::min_element(group.begin(), group.end(), NaturalLess);
}

std::set<std::string> TcePartition::Survivors() const {
  std::set<std::string> out = unique;
  for (const auto& group : redundant_groups) out.insert(Representative(group));
  return out;
}

TcePartition Partition(const std::vector<BuildOutcome>& outcomes,
                       const std::vector<std::string>& levels) {
  const BuildOutcome* original = nullptr;
  for (const BuildOutcome& outcome : outcomes) {
    for (const std::string& level : levels) {
      if (outcome.per_level.count(level) == 0) {
        throw Error(ErrorCode::kMissingLevel, outcome.id + " has no result at " + level);
      }
    }
    if (outcome.id == kOriginalId) original = &outcome;
  }
  if (original == nullptr) {
    throw Error(ErrorCode::kMissingLevel, "no outcome for the original program");
  }

  TcePartition partition;
  std::vector<const BuildOutcome*> compiled;
  for (const BuildOutcome& outcome : outcomes) {
    if (&outcome == original) continue;
    if (outcome.AnyFailed()) {
      partition.compile_failed.insert(outcome.id);
      continue;
    }
    bool equivalent = false;
    for (const std::string& level : levels) {
      const LevelResult& base = original->per_level.at(level);
      if (base.ok && base.digest == outcome.per_level.at(level).digest) equivalent = true;
    }
    if (equivalent) {
      partition.equivalent.insert(outcome.id);
    } else {
      compiled.push_back(&outcome);
    }
  }

  std::vector<std::size_t> parent(compiled.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const std::string& level : levels) {
    std::map<std::string, std::size_t> first_with_digest;
    for (std::size_t i = 0; i < compiled.size(); ++i) {
      const std::string& digest = compiled[i]->per_level.at(level).digest;
      auto [it, inserted] = first_with_digest.emplace(digest, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  }
  std::map<std::size_t, std::set<std::string>> groups;
  for (std::size_t i = 0; i < compiled.size(); ++i) groups[find(i)].insert(compiled[i]->id);
  for (auto& [root, members] : groups) {
    if (members.size() == 1) {
      partition.unique.insert(*members.begin());
    } else {
      partition.redundant_groups.push_back(std::move(members));
    }
  }
  std::sort(partition.redundant_groups.begin(), partition.redundant_groups.end(),
            [](const auto& a, const auto& b) {
              return NaturalLess(TcePartition::Representative(a),
                                 TcePartition::Representative(b));
            });
  return partition;
}

std::string FormatDigests(const std::vector<BuildOutcome>& outcomes) {
  std::ostringstream out;
  for (const BuildOutcome& outcome : outcomes) {
    for (const auto& [level, result] : outcome.per_level) {
      out << outcome.id << ' ' << level << ' ' << (result.ok ? result.digest : "FAIL")
          << '\n';
    }
  }
  return out.str();
}

std::vector<BuildOutcome> ParseDigests(std::string_view text) {
  std::vector<BuildOutcome> out;
  std::map<std::string, std::size_t> index;
  std::size_t line_no = 0;
  for (const std::string& raw : SplitLines(text)) {
    ++line_no;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id, level, digest, extra;
    fields >> id >> level >> digest;
    if (digest.empty() || (fields >> extra)) {
      throw Error(ErrorCode::kFormatError,
                  "digest line " + std::to_string(line_no) + ": expected 3 fields");
    }
    LevelResult result;
    if (digest != "FAIL") {
      const bool hex = digest.size() == 128 &&
                       std::all_of(digest.begin(), digest.end(), [](char c) {
                         return std::isdigit(static_cast<unsigned char>(c)) ||
                                (c >= 'a' && c <= 'f');
                       });
      if (!hex) {
        throw Error(ErrorCode::kFormatError,
                    "digest line " + std::to_string(line_no) + ": bad digest");
      }
      result.ok = true;
      result.digest = digest;
    }
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) out.push_back(BuildOutcome{id, {}});
    out[it->second].per_level[level] = result;
  }
  return out;
}

}  // namespace mutafuzz::buildctl
