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

#include "iotsam/model/types.hpp"

#include <algorithm>

namespace iotsam::model {

bool is_wireless_protocol(std::string_view token) {
  return std::find(kWirelessProtocols.begin(), kWirelessProtocols.end(), token) !=
         kWirelessProtocols.end();
}

std::string attribute_text(const AttributeValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      value);
}

const AttributeValue* DeviceComponent::attribute(const std::string& name) const {
  auto it = attributes.find(name);
  return it == attributes.end() ? nullptr : &it->second;
}

const DeviceComponent* DeviceModel::find_component(std::string_view id) const {
  for (const auto& c : components) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

VerificationLevel TestingProfile::effective_verification(ComponentKind kind) const {
  auto it = verification_overrides.find(kind);
  return it == verification_overrides.end() ? verification_level : it->second;
}

bool ComponentSelector::matches(const DeviceComponent& component) const {
  if (kind && *kind != component.kind) return false;
  for (const auto& c : constraints) {
    const AttributeValue* actual = component.attribute(c.attribute);
    switch (c.op) {
      case SelectorOp::Present:
        if (actual == nullptr) return false;
        break;
      case SelectorOp::Eq:
        if (actual == nullptr || !c.value || *actual != *c.value) return false;
        break;
      case SelectorOp::Neq:
        if (actual != nullptr && c.value && *actual == *c.value) return false;
        break;
    }
  }
  return true;
}

const TestCase* TestCaseCatalog::find(std::string_view case_id) const {
  for (const auto& c : cases) {
    if (c.case_id == case_id) return &c;
  }
  return nullptr;
}

}  // namespace iotsam::model
