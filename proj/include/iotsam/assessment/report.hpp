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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "iotsam/assessment/assessment.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/harness/observation.hpp"

namespace iotsam::assessment {

struct ReportRow {
  std::string plan_entry_id;
  std::string case_id;
  std::string title;
  std::string target_component_id;
  model::Severity severity = model::Severity::Minor;
  model::ExecutionMode mode = model::ExecutionMode::Automated;
  std::string protocol_id;
  harness::Outcome protocol_outcome = harness::Outcome::Pass;
  EffectiveOutcome effective_outcome = EffectiveOutcome::Pass;
  std::string rationale;
  /// sha256 of the canonical protocol document.
  std::string protocol_digest;
  /// EVIDENCE_DIGEST observations attached to the protocol.
  std::vector<harness::EvidenceDigestPayload> evidence;

  bool operator==(const ReportRow&) const = default;
};

struct AssessmentReport {
  std::string plan_id;
  std::string device_id;
  std::string profile_id;
  std::string catalog_id;
  std::string catalog_version;
  OverallVerdict overall;
  filter::CoverageReport coverage;
  std::vector<ReportRow> rows;  // plan order

  bool operator==(const AssessmentReport&) const = default;
};

inline constexpr std::string_view kReportKind = "assessment-report";

/// CROSS_REFERENCE when plan, protocols, verdicts and overall do not refer
/// to each other consistently.
AssessmentReport render_report(const filter::TestPlan& plan,
                               std::span<const harness::ExecutionProtocol> protocols,
                               std::span<const CaseVerdict> verdicts, const OverallVerdict& overall);

json_io::Json to_json(const AssessmentReport& report);
AssessmentReport report_from_json(const json_io::Json& node, const std::string& path = {});
std::string serialize_report(const AssessmentReport& report);
AssessmentReport parse_report(std::string_view bytes);

/// Human-readable form: verdict and rules, then failed cases with
/// rationales and digests, then the remaining cases.
std::string report_text(const AssessmentReport& report);

}  // namespace iotsam::assessment
