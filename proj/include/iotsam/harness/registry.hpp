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
#include <functional>
#include <map>
#include <span>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

#include "iotsam/harness/protocol.hpp"

namespace iotsam::harness {

enum class ParameterType { String, Integer, Boolean, PortRange };

struct ParameterSpec {
  std::string name;
  ParameterType type = ParameterType::String;
  bool required = true;
};

struct ExecutorDescriptor {
  std::string capability;  // e.g. "net.port-scan"
  std::string version;
  std::vector<ParameterSpec> parameters;
  std::vector<ObservationKind> produces;
};

struct PortRange {
  std::uint16_t first = 1;
  std::uint16_t last = 1;
  bool operator==(const PortRange&) const = default;
};

/// Parses "N" or "A-B" with 1 <= A <= B <= 65535.
std::optional<PortRange> parse_port_range(std::string_view text);

using ParameterValue = std::variant<std::string, std::int64_t, bool, PortRange>;

/// Typed executor parameters, checked against an ExecutorDescriptor.
class Parameters {
 public:
  Parameters() = default;
  explicit Parameters(std::map<std::string, ParameterValue> values) : values_(std::move(values)) {}

  bool has(const std::string& name) const { return values_.contains(name); }
  const std::string& text(const std::string& name) const;
  std::int64_t integer(const std::string& name, std::int64_t fallback) const;
  std::int64_t integer(const std::string& name) const;
  bool boolean(const std::string& name, bool fallback) const;
  PortRange port_range(const std::string& name) const;

 private:
  std::map<std::string, ParameterValue> values_;
};

/// The harness-level per-entry timeout parameter. It is not part of any
/// executor's schema.
inline constexpr std::string_view kTimeoutParameter = "timeout-seconds";

/// INVALID_PARAMETERS on a missing required parameter, an unknown name, or
/// a value that does not parse as its declared type.
Parameters validate_parameters(const ExecutorDescriptor& descriptor,
                               const std::map<std::string, std::string>& raw);

struct ExecutionContext {
  std::string case_id;
  std::string plan_entry_id;
  std::string target_component_id;
  Parameters parameters;
  std::stop_token stop;
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  std::string rationale;
};

/// Runs the probe; may throw, may be abandoned after its timeout (the stop
/// token is then signalled).
using ExecutorBehavior = std::function<std::vector<PerformedStep>(const ExecutionContext&)>;

/// Maps a case's observations to PASS, FAIL or INCONCLUSIVE.
using VerdictMapper =
    std::function<Verdict(std::string_view case_id, std::span<const Observation> observations)>;

struct RegisteredExecutor {
  ExecutorDescriptor descriptor;
  ExecutorBehavior behavior;
  VerdictMapper verdict;
};

class ExecutorRegistry {
 public:
  /// DUPLICATE_CAPABILITY if the token is already registered.
  ExecutorRegistry& register_executor(ExecutorDescriptor descriptor, ExecutorBehavior behavior,
                                      VerdictMapper verdict);

  const RegisteredExecutor* find(std::string_view capability) const;
  /// Descriptors ordered by capability token.
  std::vector<ExecutorDescriptor> list() const;
  std::size_t size() const { return executors_.size(); }

 private:
  std::map<std::string, RegisteredExecutor, std::less<>> executors_;
};

json_io::Json to_json(const ExecutorDescriptor& descriptor);

}  // namespace iotsam::harness

namespace iotsam::model {

template <>
struct EnumTraits<harness::ParameterType> {
  static constexpr std::array entries{
      std::pair{harness::ParameterType::String, std::string_view{"string"}},
      std::pair{harness::ParameterType::Integer, std::string_view{"integer"}},
      std::pair{harness::ParameterType::Boolean, std::string_view{"boolean"}},
      std::pair{harness::ParameterType::PortRange, std::string_view{"port-range"}},
  };
};

}  // namespace iotsam::model
