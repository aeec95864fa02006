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

#include <string>
#include <vector>

#include "iotsam/harness/observation.hpp"

namespace iotsam::harness {

enum class Outcome { Pass, Fail, Inconclusive, Skipped, Error };

inline constexpr std::string_view kManualIdentity = "manual";

/// Either an automated executor (identity = capability token, version set)
/// or the manual path (identity "manual", assessor_id set).
struct ExecutorIdentity {
  std::string identity;
  std::string version;
  std::string assessor_id;

  bool is_manual() const { return identity == kManualIdentity; }
  bool operator==(const ExecutorIdentity&) const = default;
};

struct PerformedStep {
  std::string text;
  std::vector<Observation> observations;
  bool operator==(const PerformedStep&) const = default;
};

struct ExecutionProtocol {
  std::string protocol_id;
  std::string plan_id;
  std::string plan_entry_id;
  std::string case_id;
  ExecutorIdentity executor;
  Timestamp started_at{};
  Timestamp ended_at{};
  std::vector<PerformedStep> steps;
  Outcome outcome = Outcome::Inconclusive;
  std::string rationale;

  std::vector<Observation> all_observations() const;
  bool operator==(const ExecutionProtocol&) const = default;
};

inline constexpr std::string_view kProtocolKind = "execution-protocol";

/// Protocol ids are derived from the plan entry so a re-run of the same plan
/// yields the same ids.
std::string protocol_id_for(std::string_view plan_entry_id);

json_io::Json to_json(const ExecutionProtocol& protocol);
ExecutionProtocol protocol_from_json(const json_io::Json& node, const std::string& path = {});
std::string serialize_protocol(const ExecutionProtocol& protocol);
ExecutionProtocol parse_protocol(std::string_view bytes);

}  // namespace iotsam::harness

namespace iotsam::model {

template <>
struct EnumTraits<harness::Outcome> {
  static constexpr std::array entries{
      std::pair{harness::Outcome::Pass, std::string_view{"PASS"}},
      std::pair{harness::Outcome::Fail, std::string_view{"FAIL"}},
      std::pair{harness::Outcome::Inconclusive, std::string_view{"INCONCLUSIVE"}},
      std::pair{harness::Outcome::Skipped, std::string_view{"SKIPPED"}},
      std::pair{harness::Outcome::Error, std::string_view{"ERROR"}},
  };
};

}  // namespace iotsam::model
