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

#include "mutafuzz/fuzzer/fuzzer.h"

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <map>
#include <set>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"
#include "mutafuzz/common/runtime_sources.h"
#include "mutafuzz/covtrace/covtrace.h"
#include "mutafuzz/fuzzdrv/fuzzdrv.h"

namespace mutafuzz::fuzzer {

namespace fs = std::filesystem;

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kBitflip: return "bitflip";
    case Stage::kByteflip: return "byteflip";
    case Stage::kArith8: return "arith8";
    case Stage::kArith16: return "arith16";
    case Stage::kArith32: return "arith32";
    case Stage::kInteresting: return "interesting";
    case Stage::kHavoc: return "havoc";
    case Stage::kSplice: return "splice";
  }
  return "?";
}

const std::vector<std::int64_t>& InterestingValues() {
  static const std::vector<std::int64_t> values = {
      0, 1, -1, 127, -128, 255, 32767, -32768, 2147483647, -2147483648LL};
  return values;
}

void FlipBit(std::string& bytes, std::size_t bit) {
  bytes[bit / 8] = static_cast<char>(static_cast<unsigned char>(bytes[bit / 8]) ^ (1u << (bit % 8)));
}

void WriteLe(std::string& bytes, std::size_t offset, std::size_t width, std::int64_t value) {
  if (bytes.size() < offset + width) bytes.resize(offset + width, '\0');
  const auto raw = static_cast<std::uint64_t>(value);
  for (std::size_t i = 0; i < width; ++i) {
    bytes[offset + i] = static_cast<char>((raw >> (8 * i)) & 0xff);
  }
}

std::string Splice(std::string_view head, std::string_view tail, std::size_t cut) {
  std::string out(head.substr(0, std::min(cut, head.size())));
  if (cut < tail.size()) out += tail.substr(cut);
  return out;
}

namespace {

std::int64_t ReadLe(const std::string& bytes, std::size_t offset, std::size_t width) {
  std::uint64_t raw = 0;
  for (std::size_t i = width; i-- > 0;) {
    const std::size_t at = offset + i;
    raw = (raw << 8) | (at < bytes.size() ? static_cast<unsigned char>(bytes[at]) : 0u);
  }
  return static_cast<std::int64_t>(raw);
}

void Arith(std::string& bytes, Rng& rng, std::size_t width) {
  const std::size_t span = bytes.size() >= width ? bytes.size() - width + 1 : 1;
  const std::size_t offset = rng.Below(span);
  std::int64_t delta = 1 + static_cast<std::int64_t>(rng.Below(35));
  if (rng.OneIn(2)) delta = -delta;
  WriteLe(bytes, offset, width, ReadLe(bytes, offset, width) + delta);
}

void Interesting(std::string& bytes, Rng& rng) {
  static const std::size_t kWidths[] = {1, 2, 4};
  const std::size_t width = kWidths[rng.Below(3)];
  std::vector<std::int64_t> fitting;
  const std::int64_t lo = -(std::int64_t{1} << (8 * width - 1));
  const std::int64_t hi = (std::int64_t{1} << (8 * width)) - 1;
  for (std::int64_t v : InterestingValues()) {
    if (v >= lo && v <= hi) fitting.push_back(v);
  }
  const std::size_t slots = std::max<std::size_t>(1, bytes.size() / width);
  WriteLe(bytes, width * rng.Below(slots), width, fitting[rng.Below(fitting.size())]);
}

void Havoc(std::string& bytes, Rng& rng) {
  const std::size_t rounds = std::size_t{1} << (1 + rng.Below(5));
  for (std::size_t r = 0; r < rounds; ++r) {
    switch (rng.Below(8)) {
      case 0:
        FlipBit(bytes, rng.Below(bytes.size() * 8));
        break;
      case 1:
        bytes[rng.Below(bytes.size())] = static_cast<char>(rng.Below(256));
        break;
      case 2:
        Arith(bytes, rng, 1);
        break;
      case 3:
        Arith(bytes, rng, rng.OneIn(2) ? 2 : 4);
        break;
      case 4:
        Interesting(bytes, rng);
        break;
      case 5:
        if (bytes.size() > 1) {
          const std::size_t length = 1 + rng.Below(bytes.size() - 1);
          bytes.erase(rng.Below(bytes.size() - length + 1), length);
        }
        break;
      case 6: {
        const std::size_t length = 1 + rng.Below(bytes.size());
        const std::size_t from = rng.Below(bytes.size() - length + 1);
        const std::string block = bytes.substr(from, length);
        bytes.insert(rng.Below(bytes.size() + 1), block);
        break;
      }
      default: {
        const std::size_t length = 1 + rng.Below(bytes.size());
        const std::size_t at = rng.Below(bytes.size() - length + 1);
        for (std::size_t i = 0; i < length; ++i) {
          bytes[at + i] = static_cast<char>(rng.Below(256));
        }
        break;
      }
    }
    if (bytes.size() > kMaxInputBytes) bytes.resize(kMaxInputBytes);
  }
}

}  // namespace

std::string MutateInput(std::string_view input, Rng& rng, Stage stage, std::string_view other) {
  std::string bytes(input.substr(0, std::min(input.size(), kMaxInputBytes)));
  if (bytes.empty()) bytes.push_back('\0');
  switch (stage) {
    case Stage::kBitflip:
      FlipBit(bytes, rng.Below(bytes.size() * 8));
      break;
    case Stage::kByteflip: {
      const std::size_t at = rng.Below(bytes.size());
      bytes[at] = static_cast<char>(~static_cast<unsigned char>(bytes[at]));
      break;
    }
    case Stage::kArith8:
      Arith(bytes, rng, 1);
      break;
    case Stage::kArith16:
      Arith(bytes, rng, 2);
      break;
    case Stage::kArith32:
      Arith(bytes, rng, 4);
      break;
    case Stage::kInteresting:
      Interesting(bytes, rng);
      break;
    case Stage::kHavoc:
      Havoc(bytes, rng);
      break;
    case Stage::kSplice:
      if (other.empty()) {
        Havoc(bytes, rng);
      } else {
        const std::size_t longest = std::max(bytes.size(), other.size());
        bytes = Splice(bytes, other, 1 + rng.Below(longest));
        if (bytes.empty()) bytes.push_back('\0');
      }
      break;
  }
  if (bytes.size() > kMaxInputBytes) bytes.resize(kMaxInputBytes);
  return bytes;
}

std::string_view ExecVerdictName(ExecVerdict verdict) {
  switch (verdict) {
    case ExecVerdict::kKilledDiff: return "killed-diff";
    case ExecVerdict::kKilledCrash: return "killed-crash";
    case ExecVerdict::kLive: return "live";
    case ExecVerdict::kInconclusive: return "inconclusive";
    case ExecVerdict::kTimeout: return "timeout";
  }
  return "?";
}

namespace {

bool HasLine(const std::vector<std::string>& lines, std::string_view sentinel) {
  return std::find(lines.begin(), lines.end(), sentinel) != lines.end();
}

}  // namespace

ExecVerdict Classify(const ProcessResult& process, std::string_view log) {
  if (process.timed_out) return ExecVerdict::kTimeout;
  const std::vector<std::string> lines = SplitLines(log);
  const bool killed = HasLine(lines, fuzzdrv::kMutantKilled);
  const bool alive = HasLine(lines, fuzzdrv::kMutantAlive);
  if (process.signaled) {
    if (process.signal == SIGABRT && killed) return ExecVerdict::kKilledDiff;
    if (HasLine(lines, fuzzdrv::kCallingMutated) && !killed && !alive) {
      return ExecVerdict::kKilledCrash;
    }
    return ExecVerdict::kInconclusive;
  }
  if (process.exited && process.exit_code == 0 && alive) return ExecVerdict::kLive;
  return ExecVerdict::kInconclusive;
}

Runner::Runner(fs::path binary, fs::path workdir, std::chrono::milliseconds timeout)
    : binary_(std::move(binary)), workdir_(std::move(workdir)), timeout_(timeout) {}

Execution Runner::Run(std::string_view input) const {
  const fs::path input_path = workdir_ / ".cur_input";
  const fs::path log_path = workdir_ / ".cur_log";
  const fs::path edge_path = workdir_ / ".cur_edges";
  WriteFile(input_path, input);
  fs::remove(log_path);
  fs::remove(edge_path);
  Execution exec;
  exec.process = RunProcess({{binary_.string(), input_path.string()},
                             workdir_,
                             {{"MUTAFUZZ_LOG_FILE", log_path.string()},
                              {"MUTAFUZZ_EDGE_FILE", edge_path.string()}},
                             timeout_,
                             false});
  if (fs::exists(log_path)) exec.log = ReadFile(log_path);
  exec.verdict = Classify(exec.process, exec.log);
  if (!exec.process.timed_out && fs::exists(edge_path)) {
    try {
      exec.fingerprint = covtrace::ReadEdgeFile(edge_path).Fingerprint();
    } catch (const Error&) {
      // A truncated edge file only loses coverage feedback.
    }
  }
  return exec;
}

bool ConfirmKill(const fs::path& nondet_binary, std::string_view input, const fs::path& workdir,
                 std::chrono::milliseconds timeout) {
  const Execution exec = Runner(nondet_binary, workdir, timeout).Run(input);
  return !exec.process.timed_out && exec.process.exited && exec.process.exit_code == 0;
}

std::string_view CampaignVerdictName(CampaignVerdict verdict) {
  switch (verdict) {
    case CampaignVerdict::kKilledDiff: return "killed-diff";
    case CampaignVerdict::kKilledCrash: return "killed-crash";
    case CampaignVerdict::kLive: return "live";
    case CampaignVerdict::kNotRun: return "not-run";
  }
  return "?";
}

std::optional<CampaignVerdict> ParseCampaignVerdict(std::string_view name) {
  for (CampaignVerdict v : {CampaignVerdict::kKilledDiff, CampaignVerdict::kKilledCrash,
                            CampaignVerdict::kLive, CampaignVerdict::kNotRun}) {
    if (CampaignVerdictName(v) == name) return v;
  }
  return std::nullopt;
}

std::string FormatStats(const CampaignResult& result) {
  char wall[64];
  std::snprintf(wall, sizeof(wall), "%.3f", result.wall_time_s);
  std::string out;
  out += "execs=" + std::to_string(result.executions) + "\n";
  out += "unique_fingerprints=" + std::to_string(result.unique_fingerprints) + "\n";
  out += "verdict=" + std::string(CampaignVerdictName(result.verdict)) + "\n";
  out += "wall_time_s=" + std::string(wall) + "\n";
  return out;
}

namespace {

std::string EntryName(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "id_%06zu.bin", id);
  return buf;
}

class Campaign {
 public:
  explicit Campaign(const CampaignOptions& options)
      : options_(options),
        runner_(options.driver, options.workdir, options.exec_timeout),
        rng_(options.rng_seed),
        start_(std::chrono::steady_clock::now()) {
    result_.mutant_id = options.mutant_id;
  }

  CampaignResult Run() {
    fs::create_directories(options_.workdir / "corpus");
    fs::create_directories(options_.workdir / "kills");
    if (options_.seeds.empty()) {
      throw Error(ErrorCode::kBadValue, "campaign needs at least one seed");
    }
    if (options_.budget.max_execs == 0 || options_.budget.max_seconds <= 0.0) {
      result_.error = "empty budget";
      return Finish();
    }
    bool stop = false;
    for (std::size_t i = 0; i < options_.seeds.size() && !stop; ++i) {
      const Execution exec = runner_.Run(options_.seeds[i]);
      ++result_.executions;
      if (i == 0 && (!exec.process.spawned ||
                     !HasLine(SplitLines(exec.log), fuzzdrv::kCallingOriginal))) {
        result_.error = "driver won't run: " + DescribeProcessResult(exec.process);
        return Finish();
      }
      stop = Handle(options_.seeds[i], std::nullopt, exec, /*is_seed=*/true);
    }
    if (corpus_.empty()) AddEntry(options_.seeds[0], std::nullopt, {});
    std::size_t cursor = 0;
    while (!stop) {
      const std::size_t pick = cursor++ % corpus_.size();
      const unsigned energy = Energy(corpus_[pick]);
      corpus_[pick].energy = energy;
      for (unsigned e = 0; e < energy && !stop; ++e) {
        auto stage = static_cast<Stage>(rng_.Below(8));
        std::string other;
        if (stage == Stage::kSplice) {
          if (corpus_.size() > 1) {
            std::size_t partner = rng_.Below(corpus_.size() - 1);
            if (partner >= pick) ++partner;
            other = corpus_[partner].bytes;
          } else {
            stage = Stage::kHavoc;
          }
        }
        const std::string input = MutateInput(corpus_[pick].bytes, rng_, stage, other);
        const Execution exec = runner_.Run(input);
        ++result_.executions;
        stop = Handle(input, corpus_[pick].id, exec, false);
      }
    }
    return Finish();
  }

 private:
  bool OutOfBudget() const {
    return result_.executions >= options_.budget.max_execs ||
           Elapsed() >= options_.budget.max_seconds;
  }

  double Elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // Returns true when the campaign should stop.
  bool Handle(const std::string& input, std::optional<std::size_t> parent, const Execution& exec,
              bool is_seed) {
    if (exec.fingerprint) {
      fingerprints_.insert(covtrace::FingerprintHash(*exec.fingerprint));
      bool novel = false;
      for (std::uint32_t element : *exec.fingerprint) {
        if (!seen_.count(element)) {
          novel = true;
          break;
        }
      }
      if (novel || (is_seed && corpus_.empty())) AddEntry(input, parent, *exec.fingerprint);
    }
    if (exec.verdict == ExecVerdict::kKilledDiff || exec.verdict == ExecVerdict::kKilledCrash) {
      if (ConfirmKill(options_.nondet_driver, input, options_.workdir, options_.exec_timeout)) {
        WriteFile(options_.workdir / "kills" / EntryName(result_.executions), input);
        if (!result_.killing_input) {
          result_.killing_input = input;
          result_.verdict = exec.verdict == ExecVerdict::kKilledDiff
                                ? CampaignVerdict::kKilledDiff
                                : CampaignVerdict::kKilledCrash;
        }
        if (!options_.keep_going) return true;
      } else if (++result_.rejected_kills >= options_.max_rejected_kills) {
        return true;
      }
    }
    return OutOfBudget();
  }

  void AddEntry(const std::string& bytes, std::optional<std::size_t> parent,
                const std::vector<std::uint32_t>& fingerprint) {
    CorpusEntry entry;
    entry.id = corpus_.size();
    entry.bytes = bytes;
    entry.parent = parent;
    entry.fingerprint = fingerprint;
    for (std::uint32_t element : fingerprint) {
      seen_.insert(element);
      ++holders_[element >> 4];
    }
    WriteFile(options_.workdir / "corpus" / EntryName(entry.id), bytes);
    corpus_.push_back(std::move(entry));
  }

  unsigned Energy(const CorpusEntry& entry) const {
    std::size_t rarest = SIZE_MAX;
    for (std::uint32_t element : entry.fingerprint) {
      rarest = std::min(rarest, holders_.at(element >> 4));
    }
    if (rarest <= 1) return 16;
    if (rarest == 2) return 8;
    return 4;
  }

  CampaignResult Finish() {
    if (!result_.killing_input && result_.error.empty()) result_.verdict = CampaignVerdict::kLive;
    result_.unique_fingerprints = fingerprints_.size();
    result_.corpus_size = corpus_.size();
    result_.wall_time_s = Elapsed();
    WriteFile(options_.workdir / "stats.txt", FormatStats(result_));
    return result_;
  }

  const CampaignOptions& options_;
  Runner runner_;
  Rng rng_;
  std::chrono::steady_clock::time_point start_;
  CampaignResult result_;
  std::vector<CorpusEntry> corpus_;
  std::set<std::uint32_t> seen_;
  std::map<std::uint32_t, std::size_t> holders_;
  std::set<std::uint64_t> fingerprints_;
};

}  // namespace

CampaignResult RunCampaign(const CampaignOptions& options) { return Campaign(options).Run(); }

namespace {

void Compile(const fs::path& dir, const std::string& source, const std::string& output,
             const DriverBuildOptions& options) {
  std::vector<std::string> argv = {options.compiler};
  argv.insert(argv.end(), options.cflags.begin(), options.cflags.end());
  argv.insert(argv.end(), {"-I", dir.string(), "-o", output, source,
                           std::string(kRuntimeSourceName)});
  ProcessSpec spec{argv, dir, {}, options.timeout, true};
  const ProcessResult build = RunProcess(spec);
  if (!build.Succeeded()) {
    throw Error(ErrorCode::kIoError, "compiling " + source + " failed: " +
                                         DescribeProcessResult(build) + "\n" + build.output);
  }
}

}  // namespace

DriverFiles PrepareDrivers(const cfront::SourceUnit& subject, std::string_view function,
                           const std::optional<cfront::Patch>& mutation, const fs::path& dir,
                           const DriverBuildOptions& options) {
  const auto sig = cfront::FindSignature(subject, function);
  if (!sig) {
    throw Error(ErrorCode::kUnknownStatement,
                "no function " + std::string(function) + " in " + subject.path);
  }
  const fuzzdrv::InputLayout layout = fuzzdrv::ComputeLayout(*sig);
  fs::create_directories(dir);
  WriteRuntimeFiles(dir);

  covtrace::InstrumentOptions instrument;
  instrument.mode = covtrace::InstrumentMode::kEdges;
  WriteFile(dir / "subject_edges.c", covtrace::Instrument(subject, instrument));
  covtrace::InstrumentOptions mutant_instrument = instrument;
  mutant_instrument.salt = "mut";
  mutant_instrument.emit_header = false;
  const cfront::SourceUnit mutant_unit =
      cfront::Parse(covtrace::Instrument(subject, mutant_instrument, mutation), subject.path);
  const std::string renamed = fuzzdrv::RenamedFunction(mutant_unit, function);

  WriteFile(dir / "driver.c",
            fuzzdrv::GenerateDriver(*sig, fuzzdrv::DriverPrelude("subject_edges.c", renamed)));
  WriteFile(dir / "nondet.c",
            fuzzdrv::GenerateNondetDriver(*sig, fuzzdrv::DriverPrelude("subject_edges.c", "")));
  Compile(dir, "driver.c", "driver", options);
  Compile(dir, "nondet.c", "nondet", options);

  DriverFiles files;
  files.driver = dir / "driver";
  files.nondet_driver = dir / "nondet";
  files.seeds = fuzzdrv::GenerateSeeds(layout);
  for (std::size_t i = 0; i < files.seeds.size(); ++i) {
    WriteFile(dir / ("seed_" + std::to_string(i + 1) + ".bin"), files.seeds[i]);
  }
  return files;
}

}  // namespace mutafuzz::fuzzer
