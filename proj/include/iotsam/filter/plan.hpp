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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iotsam/model/json_io.hpp"
#include "iotsam/model/types.hpp"
#include "iotsam/timestamp.hpp"

namespace iotsam::filter {

struct GuideStep {
  std::string text;
  std::string expected_observation;

  bool operator==(const GuideStep&) const = default;
};

struct ResolvedExecutor {
  std::string capability;
  std::map<std::string, std::string> parameters;

  bool operator==(const ResolvedExecutor&) const = default;
};

/// One (case, matched component) pair of a plan, with its guide and
/// executor parameters already instantiated against the device.
struct PlannedTest {
  std::string entry_id;
  std::string case_id;
  std::string title;
  std::string target_component_id;
  model::Severity severity = model::Severity::Minor;
  model::ExecutionMode mode = model::ExecutionMode::Manual;
  std::vector<GuideStep> guide;
  std::optional<ResolvedExecutor> executor;

  bool operator==(const PlannedTest&) const = default;
};

struct TestPlan {
  std::string plan_id;
  std::string device_id;
  std::string profile_id;
  std::string catalog_id;
  std::string catalog_version;
  std::vector<PlannedTest> entries;
  Timestamp created_at{};

  const PlannedTest* find(std::string_view entry_id) const;
  bool operator==(const TestPlan&) const = default;
};

inline constexpr std::string_view kTestPlanKind = "test-plan";

/// Stable id of the (case, component) pair: "<case-id>@<component-id>".
std::string entry_id_for(std::string_view case_id, std::string_view component_id);

/// Canonical entry order: severity CRITICAL to MINOR, then case-id, then
/// target component id.
bool entry_order_less(const PlannedTest& a, const PlannedTest& b);

json_io::Json planned_test_to_json(const PlannedTest& entry);
PlannedTest planned_test_from_json(const json_io::Json& node, const std::string& path);

json_io::Json to_json(const TestPlan& plan);
TestPlan plan_from_json(const json_io::Json& node, const std::string& path = {});
std::string serialize_plan(const TestPlan& plan);
TestPlan parse_plan(std::string_view bytes);

}  // namespace iotsam::filter
