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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotsam/filter/plan.hpp"
#include "iotsam/harness/protocol.hpp"
#include "iotsam/model/types.hpp"

namespace iotsam::assessment {

enum class EffectiveOutcome { Pass, Fail, Skipped };

struct CaseVerdict {
  std::string case_id;
  std::string plan_id;
  std::string plan_entry_id;
  EffectiveOutcome effective_outcome = EffectiveOutcome::Pass;
  model::Severity severity = model::Severity::Minor;
  std::string protocol_id;
  /// What the protocol itself recorded, before policy mapping.
  harness::Outcome protocol_outcome = harness::Outcome::Pass;

  bool operator==(const CaseVerdict&) const = default;
};

/// PASS/FAIL/SKIPPED carry over; INCONCLUSIVE and ERROR follow the scheme's
/// inconclusive policy. ENTRY_MISMATCH if the protocol belongs to another
/// entry.
CaseVerdict derive_case_verdict(const harness::ExecutionProtocol& protocol,
                                const filter::PlannedTest& entry,
                                const model::AssessmentScheme& scheme);

/// Counts indexed by [severity][effective outcome].
class OutcomeCounts {
 public:
  std::uint32_t get(model::Severity severity, EffectiveOutcome outcome) const;
  void add(model::Severity severity, EffectiveOutcome outcome, std::uint32_t n = 1);
  std::uint32_t fails(model::Severity severity) const { return get(severity, EffectiveOutcome::Fail); }
  bool operator==(const OutcomeCounts&) const = default;

 private:
  std::array<std::array<std::uint32_t, 3>, 3> cells_{};
};

enum class OverallResult { Secure, Insecure };

inline constexpr std::string_view kCriticalAutoFail = "critical-auto-fail";
inline constexpr std::string_view kMajorThresholdExceeded = "major-threshold-exceeded";
inline constexpr std::string_view kMinorThresholdExceeded = "minor-threshold-exceeded";

struct TriggeredRule {
  std::string rule;
  std::string detail;
  bool operator==(const TriggeredRule&) const = default;
};

struct OverallVerdict {
  OverallResult result = OverallResult::Secure;
  std::vector<TriggeredRule> triggered_rules;
  OutcomeCounts counts;
  model::AssessmentScheme scheme;
  std::string plan_id;
  bool empty_plan = false;
  std::vector<CaseVerdict> case_verdicts;

  bool operator==(const OverallVerdict&) const = default;
};

/// Names of the insecurity conditions the counts satisfy under `scheme`.
std::vector<std::string_view> insecurity_conditions(const OutcomeCounts& counts,
                                                    const model::AssessmentScheme& scheme);

/// INSECURE iff any CRITICAL fail, or a tier's fails exceed its threshold.
/// An empty input is SECURE with the empty-plan flag. MIXED_PLAN when the
/// verdicts (or `plan_id`, when given) disagree on the plan.
OverallVerdict aggregate(std::span<const CaseVerdict> verdicts, const model::AssessmentScheme& scheme,
                         std::optional<std::string> plan_id = std::nullopt);

/// Verdicts for every plan entry, in plan order. PRECONDITION if an entry
/// has no protocol; CROSS_REFERENCE if a protocol names no entry of the
/// plan.
std::vector<CaseVerdict> derive_plan_verdicts(const filter::TestPlan& plan,
                                              std::span<const harness::ExecutionProtocol> protocols,
                                              const model::AssessmentScheme& scheme);

/// derive_plan_verdicts followed by aggregate.
OverallVerdict assess_plan(const filter::TestPlan& plan,
                           std::span<const harness::ExecutionProtocol> protocols,
                           const model::AssessmentScheme& scheme);

inline constexpr std::string_view kVerdictKind = "assessment-verdict";

json_io::Json to_json(const CaseVerdict& verdict);
CaseVerdict case_verdict_from_json(const json_io::Json& node, const std::string& path);
json_io::Json to_json(const OverallVerdict& verdict);
/// Also checks that counts match the case verdicts and that result and
/// triggered rules follow from counts and scheme (INVARIANT otherwise).
OverallVerdict verdict_from_json(const json_io::Json& node, const std::string& path = {});
std::string serialize_verdict(const OverallVerdict& verdict);
OverallVerdict parse_verdict(std::string_view bytes);

}  // namespace iotsam::assessment

namespace iotsam::model {

template <>
struct EnumTraits<assessment::EffectiveOutcome> {
  static constexpr std::array entries{
      std::pair{assessment::EffectiveOutcome::Pass, std::string_view{"PASS"}},
      std::pair{assessment::EffectiveOutcome::Fail, std::string_view{"FAIL"}},
      std::pair{assessment::EffectiveOutcome::Skipped, std::string_view{"SKIPPED"}},
  };
};

template <>
struct EnumTraits<assessment::OverallResult> {
  static constexpr std::array entries{
      std::pair{assessment::OverallResult::Secure, std::string_view{"SECURE"}},
      std::pair{assessment::OverallResult::Insecure, std::string_view{"INSECURE"}},
  };
};

}  // namespace iotsam::model
