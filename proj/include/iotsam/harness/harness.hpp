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

#include <chrono>
#include <functional>
#include <optional>
#include <vector>

#include "iotsam/filter/plan.hpp"
#include "iotsam/harness/registry.hpp"

namespace iotsam::harness {

inline constexpr std::chrono::milliseconds kDefaultExecutorTimeout{30'000};
inline constexpr const char* kTimeoutEnvVar = "IOTSAM_PROBE_TIMEOUT_SECS";

struct HarnessOptions {
  Clock clock = system_clock();
  /// Replaces the 30 s default (and the environment override) when set.
  std::optional<std::chrono::milliseconds> default_timeout;
};

/// Default timeout after applying IOTSAM_PROBE_TIMEOUT_SECS, then the
/// entry's own `timeout-seconds` parameter.
std::chrono::milliseconds effective_timeout(const filter::PlannedTest& entry,
                                            const HarnessOptions& options);

/// Runs one AUTOMATED entry. Executor exceptions, verdict-mapping failures
/// and timeouts come back as an ERROR protocol. Throws UNKNOWN_CAPABILITY,
/// INVALID_PARAMETERS or PRECONDITION when the entry cannot be dispatched at
/// all.
ExecutionProtocol execute_automated(const filter::TestPlan& plan, const filter::PlannedTest& entry,
                                    const ExecutorRegistry& registry,
                                    const HarnessOptions& options = {});

/// Records an assessor-performed MANUAL or SEMI_AUTOMATED entry. One
/// observation list per guide step. Errors: PRECONDITION (automated entry),
/// INVALID_OUTCOME (ERROR is reserved for automated runs),
/// STEP_COUNT_MISMATCH.
ExecutionProtocol record_manual_result(const filter::TestPlan& plan,
                                       const filter::PlannedTest& entry,
                                       const std::string& assessor_id,
                                       std::vector<std::vector<Observation>> step_observations,
                                       Outcome outcome, std::string rationale,
                                       const Clock& clock = system_clock());

/// For SEMI_AUTOMATED entries: runs the entry's executor so the assessor can
/// attach its observations. Failures come back as a TEXT observation.
std::vector<Observation> collect_assist_observations(const filter::TestPlan& plan,
                                                     const filter::PlannedTest& entry,
                                                     const ExecutorRegistry& registry,
                                                     const HarnessOptions& options = {});

using ProtocolSink = std::function<void(const ExecutionProtocol&)>;

struct PlanRun {
  std::vector<ExecutionProtocol> protocols;   // AUTOMATED entries, plan order
  std::vector<filter::PlannedTest> pending;   // MANUAL and SEMI_AUTOMATED entries
};

/// Runs every AUTOMATED entry with up to `parallelism` concurrent workers.
/// The sink sees protocols one at a time, in plan order, whatever the
/// completion order. Dispatch failures become ERROR protocols.
PlanRun execute_plan(const filter::TestPlan& plan, const ExecutorRegistry& registry,
                     const ProtocolSink& sink, std::size_t parallelism,
                     const HarnessOptions& options = {});

}  // namespace iotsam::harness
