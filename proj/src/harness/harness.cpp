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

#include "iotsam/harness/harness.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <future>
#include <mutex>
#include <thread>

namespace iotsam::harness {

namespace {

std::optional<std::chrono::milliseconds> parse_seconds(std::string_view text) {
  double seconds = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seconds);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(seconds > 0)) return std::nullopt;
  return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0 + 0.5));
}

ExecutionProtocol protocol_skeleton(const filter::TestPlan& plan, const filter::PlannedTest& entry) {
  ExecutionProtocol p;
  p.protocol_id = protocol_id_for(entry.entry_id);
  p.plan_id = plan.plan_id;
  p.plan_entry_id = entry.entry_id;
  p.case_id = entry.case_id;
  return p;
}

struct Dispatch {
  const RegisteredExecutor* executor;
  Parameters parameters;
};

Dispatch resolve(const filter::PlannedTest& entry, const ExecutorRegistry& registry) {
  if (!entry.executor) {
    throw Error(ErrorCode::Precondition, "entry '" + entry.entry_id + "' has no executor");
  }
  const RegisteredExecutor* executor = registry.find(entry.executor->capability);
  if (executor == nullptr) {
    throw Error(ErrorCode::UnknownCapability,
                "no executor registered for '" + entry.executor->capability + "'");
  }
  return {executor, validate_parameters(executor->descriptor, entry.executor->parameters)};
}

struct BehaviorResult {
  std::vector<PerformedStep> steps;
  std::string failure;  // non-empty when the executor raised or timed out
};

BehaviorResult run_with_timeout(const RegisteredExecutor& executor, ExecutionContext context,
                                std::chrono::milliseconds timeout) {
  std::stop_source stop;
  context.stop = stop.get_token();
  auto task = std::make_shared<std::packaged_task<std::vector<PerformedStep>()>>(
      [behavior = executor.behavior, context = std::move(context)] { return behavior(context); });
  auto future = task->get_future();
  // Detached so that an executor ignoring its stop token cannot stall the
  // harness; the task keeps its own copy of the behavior.
  std::thread([task] { (*task)(); }).detach();

  if (future.wait_for(timeout) == std::future_status::timeout) {
    stop.request_stop();
    return {{}, "executor timed out after " + std::to_string(timeout.count()) + " ms"};
  }
  try {
    return {future.get(), {}};
  } catch (const Error& e) {
    return {{}, std::string("executor failed: ") + e.what()};
  } catch (const std::exception& e) {
    return {{}, std::string("executor crashed: ") + e.what()};
  } catch (...) {
    return {{}, "executor crashed with a non-standard exception"};
  }
}

}  // namespace

std::chrono::milliseconds effective_timeout(const filter::PlannedTest& entry,
                                            const HarnessOptions& options) {
  std::chrono::milliseconds timeout = kDefaultExecutorTimeout;
  if (options.default_timeout) {
    timeout = *options.default_timeout;
  } else if (const char* env = std::getenv(kTimeoutEnvVar)) {
    if (auto v = parse_seconds(env)) timeout = *v;
  }
  if (entry.executor) {
    auto it = entry.executor->parameters.find(std::string(kTimeoutParameter));
    if (it != entry.executor->parameters.end()) {
      auto v = parse_seconds(it->second);
      if (!v) {
        throw Error(ErrorCode::InvalidParameters,
                    "timeout-seconds must be a positive number, got '" + it->second + "'");
      }
      timeout = *v;
    }
  }
  return timeout;
}

ExecutionProtocol execute_automated(const filter::TestPlan& plan, const filter::PlannedTest& entry,
                                    const ExecutorRegistry& registry,
                                    const HarnessOptions& options) {
  if (entry.mode != model::ExecutionMode::Automated) {
    throw Error(ErrorCode::Precondition, "entry '" + entry.entry_id + "' is not AUTOMATED");
  }
  Dispatch dispatch = resolve(entry, registry);
  const auto timeout = effective_timeout(entry, options);

  ExecutionProtocol p = protocol_skeleton(plan, entry);
  p.executor = {dispatch.executor->descriptor.capability, dispatch.executor->descriptor.version, {}};
  p.started_at = options.clock();

  BehaviorResult run = run_with_timeout(
      *dispatch.executor,
      ExecutionContext{entry.case_id, entry.entry_id, entry.target_component_id,
                       std::move(dispatch.parameters), {}},
      timeout);
  p.steps = std::move(run.steps);
  if (!run.failure.empty()) {
    p.outcome = Outcome::Error;
    p.rationale = std::move(run.failure);
  } else {
    try {
      std::vector<Observation> observations = p.all_observations();
      Verdict v = dispatch.executor->verdict(entry.case_id, observations);
      if (v.outcome == Outcome::Skipped || v.outcome == Outcome::Error) {
        throw Error(ErrorCode::InvalidOutcome, "verdict mapping may only yield PASS, FAIL or INCONCLUSIVE");
      }
      p.outcome = v.outcome;
      p.rationale = std::move(v.rationale);
    } catch (const std::exception& e) {
      p.outcome = Outcome::Error;
      p.rationale = std::string("verdict mapping failed: ") + e.what();
    }
  }
  p.ended_at = std::max(options.clock(), p.started_at);
  return p;
}

ExecutionProtocol record_manual_result(const filter::TestPlan& plan,
                                       const filter::PlannedTest& entry,
                                       const std::string& assessor_id,
                                       std::vector<std::vector<Observation>> step_observations,
                                       Outcome outcome, std::string rationale, const Clock& clock) {
  if (entry.mode == model::ExecutionMode::Automated) {
    throw Error(ErrorCode::Precondition, "entry '" + entry.entry_id + "' is AUTOMATED");
  }
  if (outcome == Outcome::Error) {
    throw Error(ErrorCode::InvalidOutcome, "ERROR is reserved for automated execution");
  }
  if (step_observations.size() != entry.guide.size()) {
    throw Error(ErrorCode::StepCountMismatch,
                "entry '" + entry.entry_id + "' has " + std::to_string(entry.guide.size()) +
                    " steps, got " + std::to_string(step_observations.size()) +
                    " observation lists");
  }
  if (assessor_id.empty()) throw Error(ErrorCode::Precondition, "assessor id must not be empty");

  ExecutionProtocol p = protocol_skeleton(plan, entry);
  p.executor = {std::string(kManualIdentity), {}, assessor_id};
  p.started_at = clock();
  for (std::size_t i = 0; i < entry.guide.size(); ++i) {
    p.steps.push_back({entry.guide[i].text, std::move(step_observations[i])});
  }
  p.outcome = outcome;
  p.rationale = std::move(rationale);
  p.ended_at = std::max(clock(), p.started_at);
  return p;
}

std::vector<Observation> collect_assist_observations(const filter::TestPlan& plan,
                                                     const filter::PlannedTest& entry,
                                                     const ExecutorRegistry& registry,
                                                     const HarnessOptions& options) {
  (void)plan;
  try {
    Dispatch dispatch = resolve(entry, registry);
    BehaviorResult run = run_with_timeout(
        *dispatch.executor,
        ExecutionContext{entry.case_id, entry.entry_id, entry.target_component_id,
                         std::move(dispatch.parameters), {}},
        effective_timeout(entry, options));
    if (!run.failure.empty()) return {text_observation("assist probe: " + run.failure, options.clock())};
    std::vector<Observation> out;
    for (auto& step : run.steps) {
      out.insert(out.end(), step.observations.begin(), step.observations.end());
    }
    return out;
  } catch (const Error& e) {
    return {text_observation(std::string("assist probe unavailable: ") + e.what(), options.clock())};
  }
}

PlanRun execute_plan(const filter::TestPlan& plan, const ExecutorRegistry& registry,
                     const ProtocolSink& sink, std::size_t parallelism,
                     const HarnessOptions& options) {
  if (parallelism < 1) throw Error(ErrorCode::Precondition, "parallelism-limit must be >= 1");

  PlanRun out;
  std::vector<const filter::PlannedTest*> automated;
  for (const auto& e : plan.entries) {
    if (e.mode == model::ExecutionMode::Automated) {
      automated.push_back(&e);
    } else {
      out.pending.push_back(e);
    }
  }

  std::vector<std::optional<ExecutionProtocol>> results(automated.size());
  std::mutex mutex;
  std::size_t emitted = 0;
  std::exception_ptr sink_failure;
  std::atomic<std::size_t> next{0};

  auto run_entry = [&](const filter::PlannedTest& entry) {
    try {
      return execute_automated(plan, entry, registry, options);
    } catch (const Error& e) {
      ExecutionProtocol p = protocol_skeleton(plan, entry);
      p.executor = {entry.executor ? entry.executor->capability : "unknown", "unresolved", {}};
      p.started_at = options.clock();
      p.ended_at = std::max(options.clock(), p.started_at);
      p.outcome = Outcome::Error;
      p.rationale = std::string("dispatch failed: ") + e.what();
      return p;
    }
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < automated.size(); i = next++) {
      ExecutionProtocol p = run_entry(*automated[i]);
      std::lock_guard lock(mutex);
      results[i] = std::move(p);
      while (emitted < results.size() && results[emitted]) {
        if (sink && !sink_failure) {
          try {
            sink(*results[emitted]);
          } catch (...) {
            sink_failure = std::current_exception();
          }
        }
        ++emitted;
      }
    }
  };

  const std::size_t workers = std::min(parallelism, automated.size());
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
  if (workers > 0) worker();
  for (auto& t : threads) t.join();
  if (sink_failure) std::rethrow_exception(sink_failure);

  for (auto& r : results) out.protocols.push_back(std::move(*r));
  return out;
}

}  // namespace iotsam::harness
