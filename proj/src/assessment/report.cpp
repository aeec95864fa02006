// Copyright 2026 The iotsam Authors
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

#include "iotsam/assessment/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "iotsam/digest.hpp"

namespace iotsam::assessment {

using json_io::Json;
using json_io::ObjectReader;

namespace {

[[noreturn]] void dangling(const std::string& message) { throw Error(ErrorCode::CrossReference, message); }

std::vector<CaseVerdict> sorted(std::span<const CaseVerdict> verdicts) {
  std::vector<CaseVerdict> out(verdicts.begin(), verdicts.end());
  std::sort(out.begin(), out.end(), [](const CaseVerdict& a, const CaseVerdict& b) {
    return a.plan_entry_id < b.plan_entry_id;
  });
  return out;
}

}  // namespace

AssessmentReport render_report(const filter::TestPlan& plan,
                               std::span<const harness::ExecutionProtocol> protocols,
                               std::span<const CaseVerdict> verdicts, const OverallVerdict& overall) {
  if (overall.plan_id != plan.plan_id) {
    dangling("overall verdict is for plan '" + overall.plan_id + "', not " + plan.plan_id);
  }
  if (sorted(verdicts) != sorted(overall.case_verdicts)) {
    dangling("case verdicts differ from the ones the overall verdict was aggregated from");
  }
  std::map<std::string, const harness::ExecutionProtocol*> protocol_by_id;
  for (const auto& p : protocols) {
    if (p.plan_id != plan.plan_id || plan.find(p.plan_entry_id) == nullptr) {
      dangling("protocol " + p.protocol_id + " refers to entry '" + p.plan_entry_id + "' outside plan " + plan.plan_id);
    }
    protocol_by_id.emplace(p.protocol_id, &p);
  }
  std::map<std::string, const CaseVerdict*> verdict_by_entry;
  for (const auto& v : verdicts) {
    if (v.plan_id != plan.plan_id || plan.find(v.plan_entry_id) == nullptr) {
      dangling("verdict names unknown entry '" + v.plan_entry_id + "'");
    }
    auto it = protocol_by_id.find(v.protocol_id);
    if (it == protocol_by_id.end()) dangling("verdict for " + v.plan_entry_id + " names unknown protocol '" + v.protocol_id + "'");
    if (it->second->plan_entry_id != v.plan_entry_id) {
      dangling("protocol " + v.protocol_id + " records " + it->second->plan_entry_id + ", not " + v.plan_entry_id);
    }
    verdict_by_entry.emplace(v.plan_entry_id, &v);
  }

  AssessmentReport report;
  report.plan_id = plan.plan_id;
  report.device_id = plan.device_id;
  report.profile_id = plan.profile_id;
  report.catalog_id = plan.catalog_id;
  report.catalog_version = plan.catalog_version;
  report.overall = overall;
  report.coverage = filter::coverage_report(plan);
  for (const auto& entry : plan.entries) {
    auto vit = verdict_by_entry.find(entry.entry_id);
    if (vit == verdict_by_entry.end()) dangling("plan entry " + entry.entry_id + " has no verdict");
    const CaseVerdict& v = *vit->second;
    const harness::ExecutionProtocol& p = *protocol_by_id.at(v.protocol_id);
    ReportRow row;
    row.plan_entry_id = entry.entry_id;
    row.case_id = entry.case_id;
    row.title = entry.title;
    row.target_component_id = entry.target_component_id;
    row.severity = entry.severity;
    row.mode = entry.mode;
    row.protocol_id = p.protocol_id;
    row.protocol_outcome = p.outcome;
    row.effective_outcome = v.effective_outcome;
    row.rationale = p.rationale;
    row.protocol_digest = sha256_hex(harness::serialize_protocol(p));
    for (const auto& o : p.all_observations()) {
      if (auto* e = std::get_if<harness::EvidenceDigestPayload>(&o.payload)) row.evidence.push_back(*e);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Json to_json(const AssessmentReport& report) {
  Json doc = json_io::envelope(kReportKind);
  doc["plan-id"] = report.plan_id;
  doc["device-id"] = report.device_id;
  doc["profile-id"] = report.profile_id;
  doc["catalog-id"] = report.catalog_id;
  doc["catalog-version"] = report.catalog_version;
  doc["verdict"] = to_json(report.overall);
  doc["coverage"] = filter::to_json(report.coverage);
  Json cases = Json::array();
  for (const auto& row : report.rows) {
    Json node = Json::object();
    node["plan-entry-id"] = row.plan_entry_id;
    node["case-id"] = row.case_id;
    node["title"] = row.title;
    node["target-component-id"] = row.target_component_id;
    node["severity"] = std::string(model::to_token(row.severity));
    node["execution-mode"] = std::string(model::to_token(row.mode));
    node["protocol-id"] = row.protocol_id;
    node["protocol-outcome"] = std::string(model::to_token(row.protocol_outcome));
    node["effective-outcome"] = std::string(model::to_token(row.effective_outcome));
    node["rationale"] = row.rationale;
    node["protocol-digest"] = row.protocol_digest;
    Json evidence = Json::array();
    for (const auto& e : row.evidence) {
      evidence.push_back(Json{{"algorithm", e.algorithm}, {"digest", e.digest}, {"locator", e.locator}});
    }
    node["evidence"] = std::move(evidence);
    cases.push_back(std::move(node));
  }
  doc["cases"] = std::move(cases);
  return doc;
}

AssessmentReport report_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(kReportKind);
  AssessmentReport report;
  report.plan_id = r.string("plan-id");
  report.device_id = r.nonempty("device-id");
  report.profile_id = r.nonempty("profile-id");
  report.catalog_id = r.nonempty("catalog-id");
  report.catalog_version = r.nonempty("catalog-version");
  report.overall = verdict_from_json(r.required("verdict"), r.path_of("verdict"));
  report.coverage = filter::coverage_from_json(r.required("coverage"), r.path_of("coverage"));
  const std::string cases_path = r.path_of("cases");
  const Json& cases = r.array("cases");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string p = json_io::join_path(cases_path, i);
    ObjectReader cr(cases[i], p);
    ReportRow row;
    row.plan_entry_id = cr.nonempty("plan-entry-id");
    row.case_id = cr.nonempty("case-id");
    row.title = cr.string("title");
    row.target_component_id = cr.nonempty("target-component-id");
    row.severity = cr.enumeration<model::Severity>("severity");
    row.mode = cr.enumeration<model::ExecutionMode>("execution-mode");
    row.protocol_id = cr.nonempty("protocol-id");
    row.protocol_outcome = cr.enumeration<harness::Outcome>("protocol-outcome");
    row.effective_outcome = cr.enumeration<EffectiveOutcome>("effective-outcome");
    row.rationale = cr.string("rationale");
    row.protocol_digest = cr.string("protocol-digest");
    if (!is_sha256_hex(row.protocol_digest)) {
      throw Error(ErrorCode::Schema, "expected a sha256 hex digest", cr.path_of("protocol-digest"));
    }
    const std::string epath = cr.path_of("evidence");
    const Json& evidence = cr.array("evidence");
    for (std::size_t j = 0; j < evidence.size(); ++j) {
      ObjectReader er(evidence[j], json_io::join_path(epath, j));
      harness::EvidenceDigestPayload e;
      e.algorithm = er.nonempty("algorithm");
      e.digest = er.nonempty("digest");
      e.locator = er.string("locator");
      er.finish();
      row.evidence.push_back(std::move(e));
    }
    cr.finish();
    report.rows.push_back(std::move(row));
  }
  r.finish();

  // Cross-checks between the embedded parts.
  const auto& verdicts = report.overall.case_verdicts;
  if (report.overall.plan_id != report.plan_id) {
    throw Error(ErrorCode::Invariant, "embedded verdict is for another plan", r.path_of("verdict"));
  }
  if (verdicts.size() != report.rows.size() || report.coverage.total != report.rows.size()) {
    throw Error(ErrorCode::Invariant, "case table, coverage and verdict disagree on the entry count", cases_path);
  }
  std::map<std::string, const CaseVerdict*> by_entry;
  for (const auto& v : verdicts) by_entry.emplace(v.plan_entry_id, &v);
  filter::CoverageReport recount;
  recount.total = report.rows.size();
  recount.empty = report.rows.empty();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    auto it = by_entry.find(row.plan_entry_id);
    if (it == by_entry.end() || it->second->effective_outcome != row.effective_outcome ||
        it->second->protocol_id != row.protocol_id || it->second->severity != row.severity) {
      throw Error(ErrorCode::Invariant, "case row disagrees with the embedded verdict",
                  json_io::join_path(cases_path, i));
    }
    switch (row.mode) {
      case model::ExecutionMode::Automated: ++recount.automated; break;
      case model::ExecutionMode::SemiAutomated: ++recount.semi_automated; break;
      case model::ExecutionMode::Manual: ++recount.manual; break;
    }
  }
  if (recount != report.coverage) {
    throw Error(ErrorCode::Invariant, "coverage disagrees with the case table", r.path_of("coverage"));
  }
  return report;
}

std::string serialize_report(const AssessmentReport& report) { return json_io::canonical(to_json(report)); }

AssessmentReport parse_report(std::string_view bytes) { return report_from_json(json_io::parse_text(bytes)); }

namespace {

void write_row(std::ostringstream& os, const ReportRow& row, bool detailed) {
  os << "  [" << model::to_token(row.severity) << "] " << row.case_id << " on " << row.target_component_id
     << ": " << model::to_token(row.effective_outcome);
  if (row.protocol_outcome != harness::Outcome::Pass && row.protocol_outcome != harness::Outcome::Fail &&
      row.protocol_outcome != harness::Outcome::Skipped) {
    os << " (recorded " << model::to_token(row.protocol_outcome) << ")";
  }
  os << "\n    " << row.title << "\n";
  if (!detailed) return;
  os << "    mode: " << model::to_token(row.mode) << ", protocol " << row.protocol_id << "\n";
  os << "    rationale: " << (row.rationale.empty() ? "(none)" : row.rationale) << "\n";
  os << "    protocol digest: sha256:" << row.protocol_digest << "\n";
  for (const auto& e : row.evidence) {
    os << "    evidence: " << e.algorithm << ":" << e.digest;
    if (!e.locator.empty()) os << " (" << e.locator << ")";
    os << "\n";
  }
}

}  // namespace

std::string report_text(const AssessmentReport& report) {
  const auto& overall = report.overall;
  std::ostringstream os;
  os << "Assessment report\n";
  os << "  plan:    " << report.plan_id << "\n";
  os << "  device:  " << report.device_id << "\n";
  os << "  profile: " << report.profile_id << "\n";
  os << "  catalog: " << report.catalog_id << " " << report.catalog_version << "\n";
  os << "  scheme:  " << overall.scheme.scheme_id << " (major threshold " << overall.scheme.major_fail_threshold
     << ", minor threshold " << overall.scheme.minor_fail_threshold << ", "
     << model::to_token(overall.scheme.inconclusive_policy) << ")\n\n";
  os << "RESULT: " << model::to_token(overall.result) << "\n";
  if (overall.empty_plan) os << "WARNING: empty plan, nothing was tested\n";
  for (const auto& t : overall.triggered_rules) os << "  rule " << t.rule << ": " << t.detail << "\n";
  os << "\nCounts (PASS / FAIL / SKIPPED):\n";
  for (auto s : model::all_values<model::Severity>()) {
    os << "  " << model::to_token(s) << ": " << overall.counts.get(s, EffectiveOutcome::Pass) << " / "
       << overall.counts.get(s, EffectiveOutcome::Fail) << " / "
       << overall.counts.get(s, EffectiveOutcome::Skipped) << "\n";
  }
  os << "\n" << filter::coverage_text(report.coverage);

  std::size_t failed = 0;
  for (const auto& row : report.rows) failed += row.effective_outcome == EffectiveOutcome::Fail;
  os << "\nFailed cases (" << failed << "):\n";
  for (const auto& row : report.rows) {
    if (row.effective_outcome == EffectiveOutcome::Fail) write_row(os, row, true);
  }
  os << "\nOther cases (" << report.rows.size() - failed << "):\n";
  for (const auto& row : report.rows) {
    if (row.effective_outcome != EffectiveOutcome::Fail) write_row(os, row, false);
  }
  return os.str();
}

}  // namespace iotsam::assessment
