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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "iotsam/filter/plan.hpp"
#include "iotsam/model/types.hpp"

namespace iotsam::filter {

/// Names of the six prerequisite checks, in the order they appear in
/// ApplicabilityResult::reasons.
inline constexpr std::array<std::string_view, 6> kPrerequisites{
    "required-physical",   "required-authorization", "min-data-sensitivity",
    "min-security-impact", "verification-levels",    "selector",
};

struct PrerequisiteCheck {
  std::string name;
  std::string required;
  std::string actual;
  bool satisfied = false;
};

struct ApplicabilityResult {
  bool applicable = false;
  std::vector<PrerequisiteCheck> reasons;  // always all six
  /// Components that match the selector and whose effective verification
  /// level is in the case's set.
  std::vector<std::string> matched_components;

  const PrerequisiteCheck* reason(std::string_view name) const;
};

ApplicabilityResult is_applicable(const model::TestCase& test_case,
                                  const model::DeviceModel& device,
                                  const model::TestingProfile& profile);

/// Every applicable (case, matched component) pair as a plan entry in
/// canonical order. Throws UNRESOLVED_PLACEHOLDER when an applicable case's
/// templates cannot be instantiated against its component.
TestPlan filter_catalog(const model::TestCaseCatalog& catalog, const model::DeviceModel& device,
                        const model::TestingProfile& profile, const Clock& clock = system_clock());

struct InstantiatedGuide {
  std::vector<GuideStep> steps;
  std::optional<ResolvedExecutor> executor;
};

/// Substitutes `{{attr:NAME}}` and `{{device:KEY}}` in the case's manual
/// steps and executor parameters.
InstantiatedGuide instantiate_guide(const model::TestCase& test_case,
                                    const model::DeviceComponent& component,
                                    const model::DeviceModel& device);

/// Non-negative rational count/total, kept reduced.
struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  static Ratio of(std::uint64_t count, std::uint64_t total);
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  std::string text() const;  // "5/9"
  bool operator==(const Ratio&) const = default;
};

Ratio operator+(const Ratio& a, const Ratio& b);

struct CoverageReport {
  std::size_t total = 0;
  bool empty = true;
  std::size_t automated = 0;
  std::size_t semi_automated = 0;
  std::size_t manual = 0;

  std::size_t count(model::ExecutionMode mode) const;
  /// count/total; 0 for an empty plan.
  Ratio fraction(model::ExecutionMode mode) const;
  bool operator==(const CoverageReport&) const = default;
};

CoverageReport coverage_report(const TestPlan& plan);

json_io::Json to_json(const CoverageReport& coverage);
CoverageReport coverage_from_json(const json_io::Json& node, const std::string& path);
std::string coverage_text(const CoverageReport& coverage);

}  // namespace iotsam::filter
