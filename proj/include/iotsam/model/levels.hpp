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

#include "iotsam/model/tokens.hpp"

namespace iotsam::model {

// Five four-point ordinal scales. Enumerator values are the ranks.

enum class PhysicalAccess : std::uint8_t { Remote = 1, Adjacent, NonInvasive, Invasive };
enum class AuthorizationAccess : std::uint8_t { Unauthorized = 1, User, Admin, Manufacturer };
enum class DataSensitivity : std::uint8_t { NonPersonal = 1, Behavioral, Personal, Critical };
enum class SecurityImpact : std::uint8_t {
  Inconvenience = 1,
  PropertyPrivacy,
  SafetyLimited,
  SafetyCritical
};
enum class VerificationLevel : std::uint8_t { Overall = 1, Standard, Rigorous, Formal };

template <>
struct EnumTraits<PhysicalAccess> {
  static constexpr std::array entries{
      std::pair{PhysicalAccess::Remote, std::string_view{"REMOTE"}},
      std::pair{PhysicalAccess::Adjacent, std::string_view{"ADJACENT"}},
      std::pair{PhysicalAccess::NonInvasive, std::string_view{"NONINVASIVE"}},
      std::pair{PhysicalAccess::Invasive, std::string_view{"INVASIVE"}},
  };
};

template <>
struct EnumTraits<AuthorizationAccess> {
  static constexpr std::array entries{
      std::pair{AuthorizationAccess::Unauthorized, std::string_view{"UNAUTHORIZED"}},
      std::pair{AuthorizationAccess::User, std::string_view{"USER"}},
      std::pair{AuthorizationAccess::Admin, std::string_view{"ADMIN"}},
      std::pair{AuthorizationAccess::Manufacturer, std::string_view{"MANUFACTURER"}},
  };
};

template <>
struct EnumTraits<DataSensitivity> {
  static constexpr std::array entries{
      std::pair{DataSensitivity::NonPersonal, std::string_view{"NONPERSONAL"}},
      std::pair{DataSensitivity::Behavioral, std::string_view{"BEHAVIORAL"}},
      std::pair{DataSensitivity::Personal, std::string_view{"PERSONAL"}},
      std::pair{DataSensitivity::Critical, std::string_view{"CRITICAL"}},
  };
};

template <>
struct EnumTraits<SecurityImpact> {
  static constexpr std::array entries{
      std::pair{SecurityImpact::Inconvenience, std::string_view{"INCONVENIENCE"}},
      std::pair{SecurityImpact::PropertyPrivacy, std::string_view{"PROPERTY_PRIVACY"}},
      std::pair{SecurityImpact::SafetyLimited, std::string_view{"SAFETY_LIMITED"}},
      std::pair{SecurityImpact::SafetyCritical, std::string_view{"SAFETY_CRITICAL"}},
  };
};

template <>
struct EnumTraits<VerificationLevel> {
  static constexpr std::array entries{
      std::pair{VerificationLevel::Overall, std::string_view{"OVERALL"}},
      std::pair{VerificationLevel::Standard, std::string_view{"STANDARD"}},
      std::pair{VerificationLevel::Rigorous, std::string_view{"RIGOROUS"}},
      std::pair{VerificationLevel::Formal, std::string_view{"FORMAL"}},
  };
};

template <typename L>
concept LevelScale =
    std::same_as<L, PhysicalAccess> || std::same_as<L, AuthorizationAccess> ||
    std::same_as<L, DataSensitivity> || std::same_as<L, SecurityImpact> ||
    std::same_as<L, VerificationLevel>;

template <LevelScale L>
constexpr int rank(L level) {
  return static_cast<int>(level);
}

/// rank(a) <= rank(b). Both arguments must come from the same scale; mixing
/// scales does not compile.
template <LevelScale L>
constexpr bool level_leq(L a, L b) {
  return rank(a) <= rank(b);
}

template <LevelScale L>
constexpr L level_from_rank(int r) {
  return static_cast<L>(r);
}

}  // namespace iotsam::model
