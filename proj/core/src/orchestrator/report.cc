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

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mutafuzz/common/error.h"
#include "mutafuzz/orchestrator/pipeline.h"

namespace mutafuzz::orchestrator {

using Json = nlohmann::ordered_json;

std::string FormatReportJson(const Report& report) {
  Json doc;
  doc["mutation_score"] = report.score.score;
  doc["killed"] = report.score.killed;
  doc["denominator"] = report.score.denominator;
  if (!report.score.warning.empty()) doc["warning"] = report.score.warning;
  doc["total_mutants"] = report.total_mutants;
  Json counts = Json::object();
  for (const auto& [status, count] : report.counts) counts[status] = count;
  doc["counts"] = counts;
  doc["statement_coverage"] = report.statement_coverage;
  doc["executed_mutants"] = report.executed_mutants;
  if (report.fsci) {
    const FsciSummary& f = *report.fsci;
    doc["fsci"] = {{"estimate", f.estimate},   {"interval", {f.lower, f.upper}},
                   {"alpha", f.alpha},         {"width", f.width},
                   {"stopped_by", f.stopped_by}, {"examined", f.examined},
                   {"kills", f.kills},         {"trace", f.trace}};
  }
  Json mutants = Json::array();
  for (const MutantRecord& m : report.mutants) {
    Json record = {{"id", m.id},         {"file", m.file},     {"function", m.function},
                   {"operator", m.op},   {"statement", m.statement}, {"status", m.status},
                   {"note", m.note}};
    if (!m.unit_test.empty()) record["unit_test"] = m.unit_test;
    mutants.push_back(std::move(record));
  }
  doc["mutants"] = std::move(mutants);
  return doc.dump(2) + "\n";
}

Report ParseReportJson(std::string_view text) {
  Report report;
  try {
    const Json doc = Json::parse(text);
    report.score.score = doc.at("mutation_score").get<double>();
    report.score.killed = doc.at("killed").get<std::size_t>();
    report.score.denominator = doc.at("denominator").get<std::size_t>();
    report.score.warning = doc.value("warning", "");
    report.total_mutants = doc.at("total_mutants").get<std::size_t>();
    for (const auto& [status, count] : doc.at("counts").items()) {
      report.counts[status] = count.get<std::size_t>();
    }
    report.statement_coverage = doc.at("statement_coverage").get<double>();
    report.executed_mutants = doc.at("executed_mutants").get<std::size_t>();
    if (doc.contains("fsci")) {
      const Json& f = doc["fsci"];
      FsciSummary s;
      s.estimate = f.at("estimate").get<double>();
      s.lower = f.at("interval").at(0).get<double>();
      s.upper = f.at("interval").at(1).get<double>();
      s.alpha = f.at("alpha").get<double>();
      s.width = f.at("width").get<double>();
      s.stopped_by = f.at("stopped_by").get<std::string>();
      s.examined = f.at("examined").get<std::size_t>();
      s.kills = f.at("kills").get<std::size_t>();
      s.trace = f.at("trace").get<std::vector<std::string>>();
      report.fsci = std::move(s);
    }
    for (const Json& m : doc.at("mutants")) {
      MutantRecord r;
      r.id = m.at("id").get<std::string>();
      r.file = m.at("file").get<std::string>();
      r.function = m.at("function").get<std::string>();
      r.op = m.at("operator").get<std::string>();
      r.statement = m.at("statement").get<std::size_t>();
      r.status = m.at("status").get<std::string>();
      r.note = m.at("note").get<std::string>();
      r.unit_test = m.value("unit_test", "");
      report.mutants.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("report: ") + e.what());
  }
  return report;
}

std::string FormatSummary(const Report& report) {
  std::ostringstream out;
  char score[32];
  std::snprintf(score, sizeof(score), "%.4f", report.score.score);
  out << "mutation score: " << score << " (" << report.score.killed << " killed / "
      << report.score.denominator << ")\n";
  if (!report.score.warning.empty()) out << "warning: " << report.score.warning << "\n";
  std::snprintf(score, sizeof(score), "%.1f%%", 100.0 * report.statement_coverage);
  out << "statement coverage: " << score << "\n";
  out << "mutants: " << report.total_mutants << ", executed: " << report.executed_mutants
      << "\n";
  for (const auto& [status, count] : report.counts) {
    if (count) out << "  " << status << ": " << count << "\n";
  }
  if (report.fsci) {
    char line[128];
    std::snprintf(line, sizeof(line), "fsci estimate: %.4f [%.4f, %.4f] after %zu mutants (%s)",
                  report.fsci->estimate, report.fsci->lower, report.fsci->upper,
                  report.fsci->examined, report.fsci->stopped_by.c_str());
    out << line << "\n";
  }
  std::size_t tests = 0;
  for (const MutantRecord& m : report.mutants) tests += m.unit_test.empty() ? 0 : 1;
  if (tests) out << "unit tests emitted: " << tests << "\n";
  return out.str();
}

}  // namespace mutafuzz::orchestrator
