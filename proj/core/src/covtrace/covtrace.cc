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

#include "mutafuzz/covtrace/covtrace.h"

#include <algorithm>
#include <charconv>
#include <tuple>

#include "mutafuzz/common/error.h"
#include "mutafuzz/common/file_util.h"

namespace mutafuzz::covtrace {

namespace fs = std::filesystem;
using cfront::Node;
using cfront::NodeId;
using cfront::NodeKind;
using cfront::SourceUnit;

std::string_view InstrumentModeName(InstrumentMode mode) {
  switch (mode) {
    case InstrumentMode::kStatements: return "statements";
    case InstrumentMode::kEdges: return "edges";
    case InstrumentMode::kBoth: return "both";
  }
  return "?";
}

std::optional<InstrumentMode> ParseInstrumentMode(std::string_view name) {
  for (InstrumentMode mode :
       {InstrumentMode::kStatements, InstrumentMode::kEdges, InstrumentMode::kBoth}) {
    if (InstrumentModeName(mode) == name) return mode;
  }
  return std::nullopt;
}

namespace {

std::uint32_t EdgeId(std::string_view salt, std::string_view path, std::size_t seq) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(salt);
  mix(path);
  mix("#");
  mix(std::to_string(seq));
  return static_cast<std::uint32_t>(hash & 0xFFFF);
}

bool IsControl(NodeKind kind) {
  return kind == NodeKind::kIf || kind == NodeKind::kWhile || kind == NodeKind::kDoWhile ||
         kind == NodeKind::kFor || kind == NodeKind::kSwitch;
}

// Whether child slot `index` of a control statement holds a body.
bool IsBodySlot(NodeKind parent, std::size_t index) {
  switch (parent) {
    case NodeKind::kIf: return index >= 1;
    case NodeKind::kWhile: return index == 1;
    case NodeKind::kDoWhile: return index == 0;
    case NodeKind::kFor: return index == 3;
    case NodeKind::kSwitch: return index == 1;
    default: return false;
  }
}

struct PendingEdit {
  std::size_t offset;
  int phase;  // 0: closes something, 1: opens something
  int order;  // closes: inner first; opens: outer first
  std::size_t seq;
  NodeId owner;
  std::string text;
};

class Instrumenter {
 public:
  Instrumenter(const SourceUnit& unit, const InstrumentOptions& options)
      : unit_(unit),
        options_(options),
        statements_(options.mode != InstrumentMode::kEdges),
        edges_(options.mode != InstrumentMode::kStatements) {}

  std::string Run(const std::optional<cfront::Patch>& mutation) {
    for (NodeId fn : unit_.FunctionDefinitions()) {
      const Node& def = unit_.node(fn);
      // Array parameter sizes precede the body.
      if (def.children.empty() || def.children.back() == cfront::kNoNode) continue;
      NodeId body = def.children.back();
      if (unit_.node(body).kind != NodeKind::kCompound) continue;
      OpenBlock(body, 1);
      Visit(body, 1);
    }
    std::vector<cfront::Edit> edits = Finish(mutation);
    std::string out;
    if (options_.emit_header) {
      out += "#define MUTAFUZZ_COV_UNIT " + std::to_string(options_.unit_index) + "\n";
      out += "#define MUTAFUZZ_COV_STMTS " +
             std::to_string(statements_ ? unit_.statements.size() : 0) + "\n";
      out += "#include \"" + options_.header_path + "\"\n";
      if (!unit_.path.empty()) out += "#line 1 \"" + EscapePath(unit_.path) + "\"\n";
    }
    out += cfront::ApplyEdits(unit_.text, std::move(edits));
    if (options_.emit_header) {
      if (!out.empty() && out.back() != '\n') out += '\n';
      out += "#define MUTAFUZZ_COV_IMPL\n#include \"" + options_.header_path + "\"\n";
    }
    return out;
  }

 private:
  static std::string EscapePath(std::string_view path) {
    std::string out;
    for (char c : path) {
      if (c == '\\' || c == '"') out += '\\';
      out += c;
    }
    return out;
  }

  std::string EdgeProbe() {
    return "__mf_edge(" + std::to_string(EdgeId(options_.salt, unit_.path, next_edge_++)) +
           "u);";
  }

  void Add(std::size_t offset, int phase, int depth, NodeId owner, std::string text) {
    pending_.push_back(
        {offset, phase, phase == 0 ? -depth : depth, pending_.size(), owner, std::move(text)});
  }

  // Edge probe right after the `{` of a function, branch or loop body.
  void OpenBlock(NodeId block, int depth) {
    if (!edges_) return;
    Add(unit_.node(block).span.begin + 1, 1, depth, block, " " + EdgeProbe());
  }

  void Visit(NodeId id, int depth) {
    const Node& node = unit_.node(id);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      NodeId child = node.children[i];
      if (child == cfront::kNoNode) continue;
      const Node& c = unit_.node(child);
      if (!cfront::IsStatementKind(c.kind)) continue;
      const bool body = IsBodySlot(node.kind, i);
      const bool case_body = node.kind == NodeKind::kCase || node.kind == NodeKind::kDefault;
      std::string prefix;
      std::string suffix;
      if (edges_ && c.kind == NodeKind::kCompound && body && node.kind != NodeKind::kSwitch) {
        OpenBlock(child, depth + 1);
      } else if (edges_ && ((body && node.kind != NodeKind::kSwitch) || case_body)) {
        prefix += EdgeProbe() + " ";
      }
      if (statements_) {
        if (auto ordinal = unit_.StatementOrdinal(child)) {
          prefix += "__mf_stmt[" + std::to_string(*ordinal) + "]++; ";
        }
      }
      Visit(child, depth + 1);
      if (edges_ && IsControl(c.kind)) suffix += " " + EdgeProbe();
      if (body && c.kind != NodeKind::kCompound && (!prefix.empty() || !suffix.empty())) {
        prefix = "{ " + prefix;
        suffix += " }";
      }
      if (!prefix.empty()) Add(c.span.begin, 1, depth + 1, child, std::move(prefix));
      if (!suffix.empty()) Add(c.span.end, 0, depth + 1, child, std::move(suffix));
    }
  }

  std::vector<cfront::Edit> Finish(const std::optional<cfront::Patch>& mutation) {
    std::vector<PendingEdit> kept;
    for (PendingEdit& edit : pending_) {
      if (mutation) {
        const cfront::ByteSpan span = mutation->span;
        if (edit.offset > span.begin && edit.offset < span.end) continue;
        const cfront::ByteSpan owner = unit_.node(edit.owner).span;
        if (span.Contains(owner) && owner != span) continue;
      }
      kept.push_back(std::move(edit));
    }
    std::sort(kept.begin(), kept.end(), [](const PendingEdit& a, const PendingEdit& b) {
      return std::tie(a.offset, a.phase, a.order, a.seq) <
             std::tie(b.offset, b.phase, b.order, b.seq);
    });
    std::vector<cfront::Edit> edits;
    bool placed = !mutation;
    for (PendingEdit& edit : kept) {
      // Kept edits at the span's first byte belong to enclosing nodes.
      if (!placed && edit.offset > mutation->span.begin) {
        edits.push_back({mutation->span.begin, mutation->span.size(), mutation->replacement});
        placed = true;
      }
      edits.push_back({edit.offset, 0, std::move(edit.text)});
    }
    if (!placed) {
      edits.push_back({mutation->span.begin, mutation->span.size(), mutation->replacement});
    }
    return edits;
  }

  const SourceUnit& unit_;
  const InstrumentOptions& options_;
  bool statements_;
  bool edges_;
  std::size_t next_edge_ = 0;
  std::vector<PendingEdit> pending_;
};

void PutLe(std::string& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out += static_cast<char>((value >> (8 * i)) & 0xff);
}

std::uint64_t GetLe(std::string_view in, std::size_t at, int bytes) {
  std::uint64_t value = 0;
  for (int i = bytes - 1; i >= 0; --i) {
    value = (value << 8) | static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)]);
  }
  return value;
}

std::uint64_t ParseCount(std::string_view text) {
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kFormatError, "bad count '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string Instrument(const SourceUnit& unit, const InstrumentOptions& options,
                       const std::optional<cfront::Patch>& mutation) {
  if (mutation && (mutation->span.begin > mutation->span.end ||
                   mutation->span.end > unit.text.size())) {
    throw Error(ErrorCode::kSpanMismatch, "mutation span outside the unit");
  }
  return Instrumenter(unit, options).Run(mutation);
}

std::string EncodeCounters(const std::vector<std::uint64_t>& counts) {
  std::string out = "MFCV";
  PutLe(out, kCounterVersion, 4);
  PutLe(out, counts.size(), 4);
  for (std::uint64_t c : counts) PutLe(out, c, 8);
  return out;
}

std::vector<std::uint64_t> DecodeCounters(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "MFCV") {
    throw Error(ErrorCode::kFormatError, "not a counter file");
  }
  if (GetLe(bytes, 4, 4) != kCounterVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported counter file version");
  }
  const std::uint64_t n = GetLe(bytes, 8, 4);
  if (bytes.size() != 12 + n * 8) {
    throw Error(ErrorCode::kFormatError, "counter file length does not match its header");
  }
  std::vector<std::uint64_t> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = GetLe(bytes, 12 + i * 8, 8);
  return counts;
}

std::vector<std::uint64_t> ReadCounterFile(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kCounterFileMissing, path.string());
  }
  return DecodeCounters(ReadFile(path));
}

void WriteCounterFile(const fs::path& path, const std::vector<std::uint64_t>& counts) {
  WriteFile(path, EncodeCounters(counts));
}

EdgeMap::EdgeMap(std::vector<std::uint64_t> buckets) : buckets_(std::move(buckets)) {
  if (buckets_.size() != kBuckets) {
    throw Error(ErrorCode::kLengthMismatch,
                "edge map has " + std::to_string(buckets_.size()) + " buckets");
  }
}

int EdgeMap::CountClass(std::uint64_t count) {
  if (count == 0) return 0;
  if (count <= 3) return static_cast<int>(count);
  if (count <= 7) return 4;
  if (count <= 15) return 5;
  if (count <= 31) return 6;
  if (count <= 127) return 7;
  return 8;
}

void EdgeMap::Record(std::uint32_t previous, std::uint32_t current) {
  ++buckets_[Index(previous, current)];
}

std::vector<std::uint32_t> EdgeMap::Fingerprint() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < kBuckets; ++i) {
    if (buckets_[i] != 0) {
      out.push_back(static_cast<std::uint32_t>(i << 4) |
                    static_cast<std::uint32_t>(CountClass(buckets_[i])));
    }
  }
  return out;
}

std::uint64_t FingerprintHash(const std::vector<std::uint32_t>& fingerprint) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::uint32_t v : fingerprint) {
    for (int i = 0; i < 4; ++i) {
      hash ^= (v >> (8 * i)) & 0xff;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

EdgeMap ReadEdgeFile(const fs::path& path) { return EdgeMap(ReadCounterFile(path)); }

std::string StatementKey::ToString() const { return file + ":" + std::to_string(ordinal); }

std::optional<std::size_t> CoverageMatrix::StatementIndex(const StatementKey& key) const {
  auto it = std::find(statements.begin(), statements.end(), key);
  if (it == statements.end()) return std::nullopt;
  return static_cast<std::size_t>(it - statements.begin());
}

std::vector<std::size_t> CoverageMatrix::CoveringTests(std::size_t statement) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t].at(statement) > 0) out.push_back(t);
  }
  return out;
}

std::string FormatMatrix(const CoverageMatrix& matrix) {
  std::string out = "test";
  for (const StatementKey& key : matrix.statements) out += "\t" + EscapeField(key.ToString());
  out += "\n";
  for (std::size_t t = 0; t < matrix.tests.size(); ++t) {
    out += EscapeField(matrix.tests[t]);
    for (std::uint64_t c : matrix.counts[t]) out += "\t" + std::to_string(c);
    out += "\n";
  }
  return out;
}

CoverageMatrix ParseMatrix(std::string_view text) {
  std::vector<std::string> lines = SplitLines(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::kFormatError, "empty matrix file");
  CoverageMatrix matrix;
  std::vector<std::string> header = Split(lines[0], '\t');
  if (header.empty() || header[0] != "test") {
    throw Error(ErrorCode::kFormatError, "matrix header must start with 'test'");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string key = UnescapeField(header[i]);
    const std::size_t colon = key.rfind(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kFormatError, "bad statement key '" + key + "'");
    }
    matrix.statements.push_back(
        {key.substr(0, colon), static_cast<std::size_t>(ParseCount(key.substr(colon + 1)))});
  }
  for (std::size_t l = 1; l < lines.size(); ++l) {
    std::vector<std::string> fields = Split(lines[l], '\t');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kFormatError, "row " + std::to_string(l) + " has " +
                                               std::to_string(fields.size()) + " fields");
    }
    matrix.tests.push_back(UnescapeField(fields[0]));
    std::vector<std::uint64_t> row;
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(ParseCount(fields[i]));
    matrix.counts.push_back(std::move(row));
  }
  return matrix;
}

std::vector<TestCase> ParseTestList(std::string_view text) {
  std::vector<TestCase> tests;
  std::size_t line_no = 0;
  for (const std::string& raw : SplitLines(text)) {
    ++line_no;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab != std::string::npos) {
      tests.push_back({Trim(line.substr(0, tab)), Trim(line.substr(tab + 1))});
    } else {
      tests.push_back({"t" + std::to_string(line_no), line});
    }
  }
  return tests;
}

CollectResult Collect(const std::vector<TestCase>& tests, const CoverageLayout& layout,
                      const CollectOptions& options) {
  if (layout.files.size() != layout.statements.size()) {
    throw Error(ErrorCode::kLengthMismatch, "coverage layout sizes differ");
  }
  CollectResult result;
  for (std::size_t u = 0; u < layout.files.size(); ++u) {
    for (std::size_t s = 0; s < layout.statements[u]; ++s) {
      result.matrix.statements.push_back({layout.files[u], s});
    }
  }
  TempDir scratch("mutafuzz-cov");
  const fs::path counter = scratch.path() / "stmt.cov";
  const fs::path binary = fs::absolute(options.binary);
  const fs::path cwd = options.cwd.empty() ? binary.parent_path() : options.cwd;
  for (const TestCase& test : tests) {
    auto unit_file = [&](std::size_t u) {
      return u == 0 ? counter : fs::path(counter.string() + "." + std::to_string(u));
    };
    for (std::size_t u = 0; u < layout.files.size(); ++u) fs::remove(unit_file(u));
    std::string command = test.command;
    for (std::size_t at = command.find("{binary}"); at != std::string::npos;
         at = command.find("{binary}", at)) {
      command.replace(at, 8, binary.string());
      at += binary.string().size();
    }
    std::map<std::string, std::string> env = options.env;
    env["MUTAFUZZ_COV_FILE"] = counter.string();
    TestRun run;
    run.id = test.id;
    run.process = RunShell(command, cwd, options.timeout, env, true);
    run.passed = run.process.Succeeded() && !run.process.timed_out;
    std::vector<std::uint64_t> row;
    for (std::size_t u = 0; u < layout.files.size(); ++u) {
      std::vector<std::uint64_t> counts;
      if (fs::exists(unit_file(u))) {
        counts = ReadCounterFile(unit_file(u));
      } else if (run.process.timed_out || options.missing_as_zero) {
        counts.assign(layout.statements[u], 0);
      } else {
        throw Error(ErrorCode::kCounterFileMissing,
                    "test '" + test.id + "' left no counter file for " + layout.files[u]);
      }
      if (counts.size() != layout.statements[u]) {
        throw Error(ErrorCode::kLengthMismatch,
                    layout.files[u] + ": counter file has " + std::to_string(counts.size()) +
                        " statements, expected " + std::to_string(layout.statements[u]));
      }
      row.insert(row.end(), counts.begin(), counts.end());
    }
    if (run.process.timed_out) result.timed_out.push_back(test.id);
    result.matrix.tests.push_back(test.id);
    result.matrix.counts.push_back(std::move(row));
    result.runs.push_back(std::move(run));
  }
  return result;
}

}  // namespace mutafuzz::covtrace
