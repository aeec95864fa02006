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

#include "iotsam/assessment/assessment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "iotsam/model/document.hpp"

namespace iotsam::assessment {

using json_io::Json;
using json_io::ObjectReader;
using model::Severity;

namespace {

std::size_t index(Severity s) { return static_cast<std::size_t>(s); }
std::size_t index(EffectiveOutcome o) { return static_cast<std::size_t>(o); }

EffectiveOutcome under_policy(model::InconclusivePolicy policy) {
  return policy == model::InconclusivePolicy::TreatAsFail ? EffectiveOutcome::Fail
                                                          : EffectiveOutcome::Skipped;
}

bool verdict_order_less(const CaseVerdict& a, const CaseVerdict& b) {
  return std::tie(a.severity, a.case_id, a.plan_entry_id) <
         std::tie(b.severity, b.case_id, b.plan_entry_id);
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

// Failing verdicts of one tier: their case ids and how many came from
// INCONCLUSIVE or ERROR protocols.
struct TierFailures {
  std::vector<std::string> ids;
  std::size_t from_error = 0;
  std::size_t from_inconclusive = 0;
};

TierFailures failures_of(std::span<const CaseVerdict> verdicts, Severity tier) {
  TierFailures out;
  for (const auto& v : verdicts) {
    if (v.severity != tier || v.effective_outcome != EffectiveOutcome::Fail) continue;
    out.ids.push_back(v.plan_entry_id);
    if (v.protocol_outcome == harness::Outcome::Error) ++out.from_error;
    if (v.protocol_outcome == harness::Outcome::Inconclusive) ++out.from_inconclusive;
  }
  std::sort(out.ids.begin(), out.ids.end());
  return out;
}

std::string describe(const TierFailures& f, std::string_view tier, std::string_view condition) {
  std::string detail = std::to_string(f.ids.size()) + " " + std::string(tier) + " fail(s) " +
                       std::string(condition) + ": " + join_ids(f.ids);
  if (f.from_error + f.from_inconclusive > 0) {
    detail += " (" + std::to_string(f.from_error) + " from ERROR, " + std::to_string(f.from_inconclusive) +
              " from INCONCLUSIVE under TREAT_AS_FAIL)";
  }
  return detail;
}

}  // namespace

CaseVerdict derive_case_verdict(const harness::ExecutionProtocol& protocol,
                                const filter::PlannedTest& entry,
                                const model::AssessmentScheme& scheme) {
  if (protocol.plan_entry_id != entry.entry_id || protocol.case_id != entry.case_id) {
    throw Error(ErrorCode::EntryMismatch, "protocol " + protocol.protocol_id + " records " +
                                              protocol.plan_entry_id + ", not " + entry.entry_id);
  }
  CaseVerdict v;
  v.case_id = entry.case_id;
  v.plan_id = protocol.plan_id;
  v.plan_entry_id = entry.entry_id;
  v.severity = entry.severity;
  v.protocol_id = protocol.protocol_id;
  v.protocol_outcome = protocol.outcome;
  switch (protocol.outcome) {
    case harness::Outcome::Pass: v.effective_outcome = EffectiveOutcome::Pass; break;
    case harness::Outcome::Fail: v.effective_outcome = EffectiveOutcome::Fail; break;
    case harness::Outcome::Skipped: v.effective_outcome = EffectiveOutcome::Skipped; break;
    case harness::Outcome::Inconclusive:
    case harness::Outcome::Error: v.effective_outcome = under_policy(scheme.inconclusive_policy); break;
  }
  return v;
}

std::uint32_t OutcomeCounts::get(Severity severity, EffectiveOutcome outcome) const {
  return cells_[index(severity)][index(outcome)];
}

void OutcomeCounts::add(Severity severity, EffectiveOutcome outcome, std::uint32_t n) {
  cells_[index(severity)][index(outcome)] += n;
}

std::vector<std::string_view> insecurity_conditions(const OutcomeCounts& counts,
                                                    const model::AssessmentScheme& scheme) {
  std::vector<std::string_view> out;
  if (counts.fails(Severity::Critical) > 0) out.push_back(kCriticalAutoFail);
  if (counts.fails(Severity::Major) > scheme.major_fail_threshold) out.push_back(kMajorThresholdExceeded);
  if (counts.fails(Severity::Minor) > scheme.minor_fail_threshold) out.push_back(kMinorThresholdExceeded);
  return out;
}

OverallVerdict aggregate(std::span<const CaseVerdict> verdicts, const model::AssessmentScheme& scheme,
                         std::optional<std::string> plan_id) {
  OverallVerdict out;
  out.scheme = scheme;
  out.empty_plan = verdicts.empty();
  if (plan_id) out.plan_id = *plan_id;
  for (const auto& v : verdicts) {
    if (out.plan_id.empty() && !plan_id) out.plan_id = v.plan_id;
    if (v.plan_id != out.plan_id) {
      throw Error(ErrorCode::MixedPlan, "verdict for " + v.plan_entry_id + " belongs to plan '" +
                                            v.plan_id + "', expected '" + out.plan_id + "'");
    }
    out.counts.add(v.severity, v.effective_outcome);
  }
  out.case_verdicts.assign(verdicts.begin(), verdicts.end());
  std::sort(out.case_verdicts.begin(), out.case_verdicts.end(), verdict_order_less);

  for (auto condition : insecurity_conditions(out.counts, scheme)) {
    std::string detail;
    if (condition == kCriticalAutoFail) {
      detail = describe(failures_of(out.case_verdicts, Severity::Critical), "CRITICAL", "trigger AUTO_FAIL");
    } else if (condition == kMajorThresholdExceeded) {
      detail = describe(failures_of(out.case_verdicts, Severity::Major), "MAJOR",
                        "exceed threshold " + std::to_string(scheme.major_fail_threshold));
    } else {
      detail = describe(failures_of(out.case_verdicts, Severity::Minor), "MINOR",
                        "exceed threshold " + std::to_string(scheme.minor_fail_threshold));
    }
    out.triggered_rules.push_back({std::string(condition), std::move(detail)});
  }
  out.result = out.triggered_rules.empty() ? OverallResult::Secure : OverallResult::Insecure;
  return out;
}

std::vector<CaseVerdict> derive_plan_verdicts(const filter::TestPlan& plan,
                                              std::span<const harness::ExecutionProtocol> protocols,
                                              const model::AssessmentScheme& scheme) {
  std::map<std::string, const harness::ExecutionProtocol*> by_entry;
  for (const auto& p : protocols) {
    if (plan.find(p.plan_entry_id) == nullptr || p.plan_id != plan.plan_id) {
      throw Error(ErrorCode::CrossReference, "protocol " + p.protocol_id + " names entry '" +
                                                 p.plan_entry_id + "' of plan '" + p.plan_id +
                                                 "', which is not in plan " + plan.plan_id);
    }
    if (!by_entry.emplace(p.plan_entry_id, &p).second) {
      throw Error(ErrorCode::DuplicateEntry, "entry " + p.plan_entry_id + " has more than one protocol");
    }
  }
  std::vector<CaseVerdict> out;
  out.reserve(plan.entries.size());
  for (const auto& entry : plan.entries) {
    auto it = by_entry.find(entry.entry_id);
    if (it == by_entry.end()) {
      throw Error(ErrorCode::Precondition, "entry " + entry.entry_id + " has no execution protocol yet");
    }
    out.push_back(derive_case_verdict(*it->second, entry, scheme));
  }
  return out;
}

OverallVerdict assess_plan(const filter::TestPlan& plan,
                           std::span<const harness::ExecutionProtocol> protocols,
                           const model::AssessmentScheme& scheme) {
  auto verdicts = derive_plan_verdicts(plan, protocols, scheme);
  return aggregate(verdicts, scheme, plan.plan_id);
}

// ---------------------------------------------------------------------------
// documents

Json to_json(const CaseVerdict& v) {
  Json node = Json::object();
  node["case-id"] = v.case_id;
  node["plan-id"] = v.plan_id;
  node["plan-entry-id"] = v.plan_entry_id;
  node["severity"] = std::string(model::to_token(v.severity));
  node["protocol-id"] = v.protocol_id;
  node["protocol-outcome"] = std::string(model::to_token(v.protocol_outcome));
  node["effective-outcome"] = std::string(model::to_token(v.effective_outcome));
  return node;
}

CaseVerdict case_verdict_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  CaseVerdict v;
  v.case_id = r.nonempty("case-id");
  v.plan_id = r.nonempty("plan-id");
  v.plan_entry_id = r.nonempty("plan-entry-id");
  v.severity = r.enumeration<Severity>("severity");
  v.protocol_id = r.nonempty("protocol-id");
  v.protocol_outcome = r.enumeration<harness::Outcome>("protocol-outcome");
  v.effective_outcome = r.enumeration<EffectiveOutcome>("effective-outcome");
  r.finish();
  return v;
}

namespace {

Json counts_to_json(const OutcomeCounts& counts) {
  Json node = Json::object();
  for (auto s : model::all_values<Severity>()) {
    Json row = Json::object();
    for (auto o : model::all_values<EffectiveOutcome>()) row[std::string(model::to_token(o))] = counts.get(s, o);
    node[std::string(model::to_token(s))] = std::move(row);
  }
  return node;
}

OutcomeCounts counts_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  OutcomeCounts counts;
  for (auto s : model::all_values<Severity>()) {
    const std::string key(model::to_token(s));
    ObjectReader row(r.required(key), r.path_of(key));
    for (auto o : model::all_values<EffectiveOutcome>()) {
      const std::string col(model::to_token(o));
      std::int64_t n = row.integer(col);
      if (n < 0 || n > UINT32_MAX) throw Error(ErrorCode::Invariant, "count out of range", row.path_of(col));
      counts.add(s, o, static_cast<std::uint32_t>(n));
    }
    row.finish();
  }
  r.finish();
  return counts;
}

// Allowed mappings from a protocol outcome to an effective outcome.
bool consistent_mapping(harness::Outcome from, EffectiveOutcome to, model::InconclusivePolicy policy) {
  switch (from) {
    case harness::Outcome::Pass: return to == EffectiveOutcome::Pass;
    case harness::Outcome::Fail: return to == EffectiveOutcome::Fail;
    case harness::Outcome::Skipped: return to == EffectiveOutcome::Skipped;
    default: return to == under_policy(policy);
  }
}

}  // namespace

Json to_json(const OverallVerdict& v) {
  Json doc = json_io::envelope(kVerdictKind);
  doc["plan-id"] = v.plan_id;
  doc["scheme"] = model::to_json(v.scheme);
  doc["result"] = std::string(model::to_token(v.result));
  doc["empty-plan"] = v.empty_plan;
  Json rules = Json::array();
  for (const auto& t : v.triggered_rules) rules.push_back(Json{{"rule", t.rule}, {"detail", t.detail}});
  doc["triggered-rules"] = std::move(rules);
  doc["counts"] = counts_to_json(v.counts);
  Json cases = Json::array();
  for (const auto& c : v.case_verdicts) cases.push_back(to_json(c));
  doc["case-verdicts"] = std::move(cases);
  return doc;
}

OverallVerdict verdict_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(kVerdictKind);
  OverallVerdict v;
  v.plan_id = r.string("plan-id");
  v.scheme = model::scheme_from_json(r.required("scheme"), r.path_of("scheme"));
  v.result = r.enumeration<OverallResult>("result");
  v.empty_plan = r.boolean("empty-plan");
  const std::string rules_path = r.path_of("triggered-rules");
  const Json& rules = r.array("triggered-rules");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    ObjectReader tr(rules[i], json_io::join_path(rules_path, i));
    v.triggered_rules.push_back({tr.nonempty("rule"), tr.string("detail")});
    tr.finish();
  }
  v.counts = counts_from_json(r.required("counts"), r.path_of("counts"));
  const std::string cases_path = r.path_of("case-verdicts");
  const Json& cases = r.array("case-verdicts");
  OutcomeCounts recount;
  std::set<std::string> entries;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string p = json_io::join_path(cases_path, i);
    CaseVerdict c = case_verdict_from_json(cases[i], p);
    if (c.plan_id != v.plan_id) throw Error(ErrorCode::MixedPlan, "case verdict from another plan", p);
    if (!entries.insert(c.plan_entry_id).second) {
      throw Error(ErrorCode::Invariant, "duplicate verdict for " + c.plan_entry_id, p);
    }
    if (!consistent_mapping(c.protocol_outcome, c.effective_outcome, v.scheme.inconclusive_policy)) {
      throw Error(ErrorCode::Invariant, "effective outcome does not follow from the protocol outcome", p);
    }
    if (i > 0 && !verdict_order_less(v.case_verdicts.back(), c)) {
      throw Error(ErrorCode::Invariant, "case verdicts are not in canonical order", p);
    }
    recount.add(c.severity, c.effective_outcome);
    v.case_verdicts.push_back(std::move(c));
  }
  r.finish();

  if (recount != v.counts) throw Error(ErrorCode::Invariant, "counts disagree with case verdicts", r.path_of("counts"));
  if (v.empty_plan != v.case_verdicts.empty()) {
    throw Error(ErrorCode::Invariant, "empty-plan flag disagrees with case verdicts", r.path_of("empty-plan"));
  }
  auto expected = insecurity_conditions(v.counts, v.scheme);
  std::vector<std::string_view> named;
  for (const auto& t : v.triggered_rules) named.push_back(t.rule);
  if (named != expected) {
    throw Error(ErrorCode::Invariant, "triggered rules do not follow from counts and scheme", rules_path);
  }
  if ((v.result == OverallResult::Insecure) != !expected.empty()) {
    throw Error(ErrorCode::Invariant, "result does not follow from counts and scheme", r.path_of("result"));
  }
  return v;
}

std::string serialize_verdict(const OverallVerdict& verdict) { return json_io::canonical(to_json(verdict)); }

OverallVerdict parse_verdict(std::string_view bytes) { return verdict_from_json(json_io::parse_text(bytes)); }

}  // namespace iotsam::assessment
