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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "iotsam/model/levels.hpp"

namespace iotsam::model {

enum class ComponentKind {
  Sensor,
  Actuator,
  ProcessingUnit,
  Memory,
  Firmware,
  DataExchangeService,
  PhysicalInterface,
  WirelessInterface,
  NetworkService,
  UserInterface,
};

template <>
struct EnumTraits<ComponentKind> {
  static constexpr std::array entries{
      std::pair{ComponentKind::Sensor, std::string_view{"SENSOR"}},
      std::pair{ComponentKind::Actuator, std::string_view{"ACTUATOR"}},
      std::pair{ComponentKind::ProcessingUnit, std::string_view{"PROCESSING_UNIT"}},
      std::pair{ComponentKind::Memory, std::string_view{"MEMORY"}},
      std::pair{ComponentKind::Firmware, std::string_view{"FIRMWARE"}},
      std::pair{ComponentKind::DataExchangeService, std::string_view{"DATA_EXCHANGE_SERVICE"}},
      std::pair{ComponentKind::PhysicalInterface, std::string_view{"PHYSICAL_INTERFACE"}},
      std::pair{ComponentKind::WirelessInterface, std::string_view{"WIRELESS_INTERFACE"}},
      std::pair{ComponentKind::NetworkService, std::string_view{"NETWORK_SERVICE"}},
      std::pair{ComponentKind::UserInterface, std::string_view{"USER_INTERFACE"}},
  };
};

/// Closed vocabulary for the `protocol` attribute of wireless interfaces.
inline constexpr std::array<std::string_view, 12> kWirelessProtocols{
    "wifi",        "bluetooth_classic", "ble",         "zigbee",
    "thread",      "zwave",             "lorawan",     "matter",
    "cellular_2g", "cellular_3g",       "cellular_4g", "cellular_5g",
};

bool is_wireless_protocol(std::string_view token);

using AttributeValue = std::variant<std::string, std::int64_t, bool>;
using AttributeMap = std::map<std::string, AttributeValue>;

/// Text form used when substituting into guide templates.
std::string attribute_text(const AttributeValue& value);

struct DeviceComponent {
  std::string id;
  ComponentKind kind{};
  AttributeMap attributes;

  const AttributeValue* attribute(const std::string& name) const;
  bool operator==(const DeviceComponent&) const = default;
};

struct DeviceModel {
  std::string device_id;
  std::string display_name;
  std::vector<DeviceComponent> components;
  std::map<std::string, std::string> metadata;

  const DeviceComponent* find_component(std::string_view id) const;
  bool operator==(const DeviceModel&) const = default;
};

enum class EcosystemKind { CloudBackend, MobileApp, HubGateway, ThirdPartyApi };

template <>
struct EnumTraits<EcosystemKind> {
  static constexpr std::array entries{
      std::pair{EcosystemKind::CloudBackend, std::string_view{"CLOUD_BACKEND"}},
      std::pair{EcosystemKind::MobileApp, std::string_view{"MOBILE_APP"}},
      std::pair{EcosystemKind::HubGateway, std::string_view{"HUB_GATEWAY"}},
      std::pair{EcosystemKind::ThirdPartyApi, std::string_view{"THIRD_PARTY_API"}},
  };
};

struct EcosystemSystem {
  std::string id;
  EcosystemKind kind{};
  std::string endpoint;
  bool in_scope = true;

  bool operator==(const EcosystemSystem&) const = default;
};

struct TestingProfile {
  std::string profile_id;
  PhysicalAccess granted_physical = PhysicalAccess::Remote;
  AuthorizationAccess granted_authorization = AuthorizationAccess::Unauthorized;
  DataSensitivity data_sensitivity = DataSensitivity::NonPersonal;
  SecurityImpact security_impact = SecurityImpact::Inconvenience;
  VerificationLevel verification_level = VerificationLevel::Overall;
  std::vector<EcosystemSystem> ecosystem;
  std::map<ComponentKind, VerificationLevel> verification_overrides;

  /// Override for `kind` if one exists, otherwise the profile-wide level.
  VerificationLevel effective_verification(ComponentKind kind) const;
  bool operator==(const TestingProfile&) const = default;
};

enum class SelectorOp { Eq, Neq, Present };

template <>
struct EnumTraits<SelectorOp> {
  static constexpr std::array entries{
      std::pair{SelectorOp::Eq, std::string_view{"EQ"}},
      std::pair{SelectorOp::Neq, std::string_view{"NEQ"}},
      std::pair{SelectorOp::Present, std::string_view{"PRESENT"}},
  };
};

struct AttributeConstraint {
  std::string attribute;
  SelectorOp op = SelectorOp::Present;
  std::optional<AttributeValue> value;  // set iff op != Present

  bool operator==(const AttributeConstraint&) const = default;
};

/// EQ: attribute present with an identical typed value. NEQ: attribute
/// absent or different. PRESENT: attribute present.
struct ComponentSelector {
  std::optional<ComponentKind> kind;  // nullopt matches ANY kind
  std::vector<AttributeConstraint> constraints;

  bool matches(const DeviceComponent& component) const;
  bool operator==(const ComponentSelector&) const = default;
};

enum class Severity { Critical, Major, Minor };

template <>
struct EnumTraits<Severity> {
  static constexpr std::array entries{
      std::pair{Severity::Critical, std::string_view{"CRITICAL"}},
      std::pair{Severity::Major, std::string_view{"MAJOR"}},
      std::pair{Severity::Minor, std::string_view{"MINOR"}},
  };
};

enum class ExecutionMode { Automated, SemiAutomated, Manual };

template <>
struct EnumTraits<ExecutionMode> {
  static constexpr std::array entries{
      std::pair{ExecutionMode::Automated, std::string_view{"AUTOMATED"}},
      std::pair{ExecutionMode::SemiAutomated, std::string_view{"SEMI_AUTOMATED"}},
      std::pair{ExecutionMode::Manual, std::string_view{"MANUAL"}},
  };
};

struct ExecutorRef {
  std::string capability;
  std::map<std::string, std::string> parameters;  // values may hold placeholders

  bool operator==(const ExecutorRef&) const = default;
};

struct ManualStep {
  std::string instruction;
  std::string expected_observation;

  bool operator==(const ManualStep&) const = default;
};

struct TestCase {
  std::string case_id;
  std::string title;
  std::string description;
  PhysicalAccess required_physical = PhysicalAccess::Remote;
  AuthorizationAccess required_authorization = AuthorizationAccess::Unauthorized;
  DataSensitivity min_data_sensitivity = DataSensitivity::NonPersonal;
  SecurityImpact min_security_impact = SecurityImpact::Inconvenience;
  std::set<VerificationLevel> verification_levels;
  ComponentSelector selector;
  Severity severity = Severity::Minor;
  ExecutionMode mode = ExecutionMode::Manual;
  std::optional<ExecutorRef> executor;  // required iff mode != MANUAL
  std::vector<ManualStep> manual_steps;  // required iff mode != AUTOMATED
  std::vector<std::string> references;

  bool operator==(const TestCase&) const = default;
};

struct TestCaseCatalog {
  std::string catalog_id;
  std::string version;
  std::vector<TestCase> cases;

  const TestCase* find(std::string_view case_id) const;
  bool operator==(const TestCaseCatalog&) const = default;
};

enum class InconclusivePolicy { TreatAsFail, TreatAsSkip };

template <>
struct EnumTraits<InconclusivePolicy> {
  static constexpr std::array entries{
      std::pair{InconclusivePolicy::TreatAsFail, std::string_view{"TREAT_AS_FAIL"}},
      std::pair{InconclusivePolicy::TreatAsSkip, std::string_view{"TREAT_AS_SKIP"}},
  };
};

/// Threshold rules. The critical rule (any CRITICAL failure fails the
/// device) and the skipped policy (SKIPPED never counts) are fixed and are
/// serialized as the constant tokens AUTO_FAIL and EXCLUDE.
struct AssessmentScheme {
  std::string scheme_id;
  std::uint32_t major_fail_threshold = 0;
  std::uint32_t minor_fail_threshold = 0;
  InconclusivePolicy inconclusive_policy = InconclusivePolicy::TreatAsFail;

  bool operator==(const AssessmentScheme&) const = default;
};

inline constexpr std::string_view kCriticalRule = "AUTO_FAIL";
inline constexpr std::string_view kSkippedPolicy = "EXCLUDE";

}  // namespace iotsam::model
