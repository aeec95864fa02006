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


#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "generators.hpp"
#include "iotsam/error.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/harness/harness.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/probes/probes.hpp"
#include "process.hpp"

namespace {

using namespace iotsam;
using namespace iotsam::harness;
using iotsam::testing::fixture_path;
using iotsam::testing::read_file;

filter::TestPlan bundled_plan() {
  auto device = model::parse_as<model::DeviceModel>(read_file(fixture_path("smart-lock.devicemodel.json")));
  auto profile = model::parse_as<model::TestingProfile>(read_file(fixture_path("lab.profile.json")));
  auto catalog = model::parse_as<model::TestCaseCatalog>(read_file(fixture_path("mini.catalog.json")));
  return filter::filter_catalog(catalog, device, profile, iotsam::testing::fixed_clock());
}

// Registry with the bundled descriptors and verdict mapping but canned
// observations, so harness behaviour is tested without sockets.
ExecutorRegistry stub_registry() {
  ExecutorRegistry real;
  probes::register_network_probes(real);
  ExecutorRegistry stub;
  for (const auto& d : real.list()) {
    stub.register_executor(
        d,
        [cap = d.capability](const ExecutionContext& ctx) {
          Timestamp at = iotsam::testing::fixed_time(1);
          Observation o{TextPayload{"?"}, at};
          if (cap == probes::kPortScan) {
            o.payload = PortListPayload{"127.0.2.1", 1, 1024, {23, 443}};
          } else if (cap == probes::kBannerGrab) {
            o.payload = BannerPayload{"127.0.2.1", 23, "Smart Lock", true};
          } else if (cap == probes::kTlsPosture) {
            o.payload = TlsPosture{"127.0.2.1", 443, {TlsVersion::Tls10}, true, std::nullopt};
          } else {
            o.payload = CredentialResultPayload{"127.0.2.1", 23, "telnet", 20, {{"admin", "admin"}}};
          }
          return std::vector<PerformedStep>{PerformedStep{"probe " + ctx.plan_entry_id, {o}}};
        },
        probes::verdict_map);
  }
  return stub;
}

ExecutionProtocol normalized(ExecutionProtocol p) {
  p.started_at = {};
  p.ended_at = {};
  return p;
}

filter::PlannedTest automated_entry(std::string capability, std::map<std::string, std::string> params = {}) {
  filter::PlannedTest e;
  e.case_id = "TC-T";
  e.target_component_id = "c";
  e.entry_id = filter::entry_id_for(e.case_id, e.target_component_id);
  e.mode = model::ExecutionMode::Automated;
  e.severity = model::Severity::Major;
  e.executor = filter::ResolvedExecutor{std::move(capability), std::move(params)};
  return e;
}

filter::TestPlan single_entry_plan(filter::PlannedTest e) {
  filter::TestPlan plan;
  plan.plan_id = "plan-test";
  plan.entries = {std::move(e)};
  return plan;
}

ExecutorDescriptor descriptor(std::string capability) {
  return ExecutorDescriptor{std::move(capability), "0.1.0", {{"n", ParameterType::Integer, false}}, {ObservationKind::Text}};
}

Verdict always_pass(std::string_view, std::span<const Observation>) { return {Outcome::Pass, "ok"}; }

TEST(Registry, RegisterLookupAndDuplicates) {
  ExecutorRegistry r;
  r.register_executor(descriptor("net.port-scan"), [](const ExecutionContext&) { return std::vector<PerformedStep>{}; },
                      always_pass);
  EXPECT_NE(r.find("net.port-scan"), nullptr);
  EXPECT_EQ(r.find("net.other"), nullptr);
  try {
    r.register_executor(descriptor("net.port-scan"), [](const ExecutionContext&) { return std::vector<PerformedStep>{}; },
                        always_pass);
    FAIL() << "expected DUPLICATE_CAPABILITY";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateCapability);
  }
}

TEST(Registry, BundledProbesListFourDescriptors) {
  ExecutorRegistry r;
  probes::register_network_probes(r);
  auto list = r.list();
  ASSERT_EQ(list.size(), 4u);
  EXPECT_EQ(list[0].capability, "net.banner-grab");
  EXPECT_EQ(list[1].capability, "net.default-credentials");
  EXPECT_EQ(list[2].capability, "net.port-scan");
  EXPECT_EQ(list[3].capability, "net.tls-posture");
}

TEST(Parameters, ValidationErrors) {
  ExecutorDescriptor d{"x", "1", {{"host", ParameterType::String, true}, {"ports", ParameterType::PortRange, true},
                                  {"n", ParameterType::Integer, false}, {"flag", ParameterType::Boolean, false}},
                       {}};
  auto ok = validate_parameters(d, {{"host", "h"}, {"ports", "20-25"}, {"n", "3"}, {"flag", "true"}});
  EXPECT_EQ(ok.port_range("ports"), (PortRange{20, 25}));
  EXPECT_EQ(ok.integer("n"), 3);
  EXPECT_TRUE(ok.boolean("flag", false));
  EXPECT_EQ(ok.integer("missing", 9), 9);
  for (const auto& raw : std::vector<std::map<std::string, std::string>>{
           {{"ports", "1-2"}},
           {{"host", "h"}, {"ports", "1-2"}, {"extra", "1"}},
           {{"host", "h"}, {"ports", "5-1"}},
           {{"host", "h"}, {"ports", "1-2"}, {"n", "three"}},
           {{"host", "h"}, {"ports", "1-2"}, {"flag", "maybe"}}}) {
    try {
      validate_parameters(d, raw);
      ADD_FAILURE() << "expected INVALID_PARAMETERS";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParameters);
    }
  }
  EXPECT_NO_THROW(validate_parameters(d, {{"host", "h"}, {"ports", "1"}, {"timeout-seconds", "2"}}));
}

TEST(PortRange, Parsing) {
  EXPECT_EQ(parse_port_range("23"), (PortRange{23, 23}));
  EXPECT_EQ(parse_port_range("1-1024"), (PortRange{1, 1024}));
  EXPECT_FALSE(parse_port_range("0-5"));
  EXPECT_FALSE(parse_port_range("100-90"));
  EXPECT_FALSE(parse_port_range("1-65536"));
  EXPECT_FALSE(parse_port_range("a-b"));
}

TEST(ExecuteAutomated, UnknownCapability) {
  auto plan = single_entry_plan(automated_entry("net.nonexistent"));
  try {
    execute_automated(plan, plan.entries[0], stub_registry());
    FAIL() << "expected UNKNOWN_CAPABILITY";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownCapability);
  }
}

TEST(ExecuteAutomated, StubbedBundledEntriesMapVerdicts) {
  auto plan = bundled_plan();
  auto registry = stub_registry();
  auto p = execute_automated(plan, *plan.find("TC-NET-001@nw-telnet"), registry);
  EXPECT_EQ(p.outcome, Outcome::Fail);
  EXPECT_EQ(p.executor.identity, "net.port-scan");
  EXPECT_EQ(p.protocol_id, protocol_id_for("TC-NET-001@nw-telnet"));
  EXPECT_EQ(p.plan_id, plan.plan_id);
  ASSERT_EQ(p.all_observations().size(), 1u);
  EXPECT_EQ(p.all_observations()[0].kind(), ObservationKind::PortList);
}

TEST(ExecuteAutomated, CrashBecomesErrorProtocol) {
  ExecutorRegistry r;
  r.register_executor(descriptor("t.crash"),
                      [](const ExecutionContext&) -> std::vector<PerformedStep> { throw std::runtime_error("boom"); },
                      always_pass);
  auto plan = single_entry_plan(automated_entry("t.crash"));
  auto p = execute_automated(plan, plan.entries[0], r);
  EXPECT_EQ(p.outcome, Outcome::Error);
  EXPECT_NE(p.rationale.find("boom"), std::string::npos);
  EXPECT_LE(p.started_at, p.ended_at);
}

TEST(ExecuteAutomated, TimeoutBecomesErrorProtocolAndSignalsStop) {
  auto stopped = std::make_shared<std::atomic<bool>>(false);
  ExecutorRegistry r;
  r.register_executor(descriptor("t.hang"),
                      [stopped](const ExecutionContext& ctx) {
                        for (int i = 0; i < 500 && !ctx.stop.stop_requested(); ++i) {
                          std::this_thread::sleep_for(std::chrono::milliseconds(10));
                        }
                        *stopped = ctx.stop.stop_requested();
                        return std::vector<PerformedStep>{};
                      },
                      always_pass);
  auto plan = single_entry_plan(automated_entry("t.hang", {{"timeout-seconds", "0.2"}}));
  auto start = std::chrono::steady_clock::now();
  auto p = execute_automated(plan, plan.entries[0], r);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
  EXPECT_EQ(p.outcome, Outcome::Error);
  EXPECT_NE(p.rationale.find("timed out"), std::string::npos);
  for (int i = 0; i < 100 && !*stopped; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  EXPECT_TRUE(*stopped);
}

TEST(ExecuteAutomated, VerdictMapperFailureIsError) {
  ExecutorRegistry r;
  r.register_executor(descriptor("t.ok"), [](const ExecutionContext&) { return std::vector<PerformedStep>{}; },
                      [](std::string_view, std::span<const Observation>) -> Verdict {
                        throw Error(ErrorCode::UnknownCase, "no rule");
                      });
  auto plan = single_entry_plan(automated_entry("t.ok"));
  EXPECT_EQ(execute_automated(plan, plan.entries[0], r).outcome, Outcome::Error);
}

TEST(EffectiveTimeout, DefaultEnvironmentAndParameter) {
  auto e = automated_entry("t.x");
  ::unsetenv(kTimeoutEnvVar);
  EXPECT_EQ(effective_timeout(e, {}), kDefaultExecutorTimeout);
  ::setenv(kTimeoutEnvVar, "5", 1);
  EXPECT_EQ(effective_timeout(e, {}), std::chrono::milliseconds(5000));
  HarnessOptions explicit_default;
  explicit_default.default_timeout = std::chrono::milliseconds(700);
  EXPECT_EQ(effective_timeout(e, explicit_default), std::chrono::milliseconds(700));
  ::unsetenv(kTimeoutEnvVar);
  auto with_param = automated_entry("t.x", {{"timeout-seconds", "2"}});
  EXPECT_EQ(effective_timeout(with_param, explicit_default), std::chrono::milliseconds(2000));
  auto bad = automated_entry("t.x", {{"timeout-seconds", "-1"}});
  EXPECT_THROW(effective_timeout(bad, {}), Error);
}

TEST(ManualResult, ThreeStepsRecorded) {
  auto plan = bundled_plan();
  const auto& entry = *plan.find("TC-WL-001@radio-ble");
  ASSERT_EQ(entry.guide.size(), 3u);
  auto p = record_manual_result(plan, entry, "alice",
                                {{text_observation("adv seen")}, {}, {text_observation("LESC")}},
                                Outcome::Pass, "pairing needs passkey", iotsam::testing::fixed_clock());
  EXPECT_EQ(p.outcome, Outcome::Pass);
  EXPECT_TRUE(p.executor.is_manual());
  EXPECT_EQ(p.executor.assessor_id, "alice");
  ASSERT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(p.steps[0].text, entry.guide[0].text);
  EXPECT_EQ(parse_protocol(serialize_protocol(p)), p);
}

TEST(ManualResult, StepCountMismatch) {
  auto plan = bundled_plan();
  try {
    record_manual_result(plan, *plan.find("TC-WL-001@radio-ble"), "alice", {{}, {}}, Outcome::Pass, "");
    FAIL() << "expected STEP_COUNT_MISMATCH";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepCountMismatch);
  }
}

TEST(ManualResult, ErrorOutcomeIsReserved) {
  auto plan = bundled_plan();
  try {
    record_manual_result(plan, *plan.find("TC-WL-001@radio-ble"), "alice", {{}, {}, {}}, Outcome::Error, "");
    FAIL() << "expected INVALID_OUTCOME";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidOutcome);
  }
}

TEST(ManualResult, AutomatedEntryRejected) {
  auto plan = bundled_plan();
  try {
    record_manual_result(plan, *plan.find("TC-NET-001@nw-telnet"), "alice", {}, Outcome::Pass, "");
    FAIL() << "expected PRECONDITION";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Precondition);
  }
}

TEST(ExecutePlan, BundledPlanSplitsFiveAndFour) {
  auto plan = bundled_plan();
  std::vector<std::string> seen;
  auto run = execute_plan(plan, stub_registry(), [&](const ExecutionProtocol& p) { seen.push_back(p.plan_entry_id); }, 4);
  EXPECT_EQ(run.protocols.size(), 5u);
  EXPECT_EQ(run.pending.size(), 4u);
  std::vector<std::string> automated_order;
  for (const auto& e : plan.entries) {
    if (e.mode == model::ExecutionMode::Automated) automated_order.push_back(e.entry_id);
  }
  EXPECT_EQ(seen, automated_order);
}

TEST(ExecutePlan, EmptyPlanEmptyOutputs) {
  filter::TestPlan plan;
  plan.plan_id = "p";
  auto run = execute_plan(plan, stub_registry(), {}, 2);
  EXPECT_TRUE(run.protocols.empty());
  EXPECT_TRUE(run.pending.empty());
}

TEST(ExecutePlan, ParallelismDoesNotChangeContents) {
  auto plan = bundled_plan();
  auto registry = stub_registry();
  auto one = execute_plan(plan, registry, {}, 1);
  auto eight = execute_plan(plan, registry, {}, 8);
  ASSERT_EQ(one.protocols.size(), eight.protocols.size());
  for (std::size_t i = 0; i < one.protocols.size(); ++i) {
    EXPECT_EQ(normalized(one.protocols[i]), normalized(eight.protocols[i]));
  }
  EXPECT_THROW(execute_plan(plan, registry, {}, 0), Error);
}

TEST(ExecutePlan, DispatchFailuresDoNotAbortRun) {
  filter::TestPlan plan;
  plan.plan_id = "p";
  auto a = automated_entry("t.missing");
  a.case_id = "TC-A";
  a.entry_id = filter::entry_id_for("TC-A", "c");
  auto b = automated_entry("t.ok");
  b.case_id = "TC-B";
  b.entry_id = filter::entry_id_for("TC-B", "c");
  plan.entries = {a, b};
  ExecutorRegistry r;
  r.register_executor(descriptor("t.ok"), [](const ExecutionContext&) { return std::vector<PerformedStep>{}; }, always_pass);
  auto run = execute_plan(plan, r, {}, 2);
  ASSERT_EQ(run.protocols.size(), 2u);
  EXPECT_EQ(run.protocols[0].outcome, Outcome::Error);
  EXPECT_EQ(run.protocols[1].outcome, Outcome::Pass);
}

TEST(Assist, FailureBecomesTextObservation) {
  auto plan = bundled_plan();
  ExecutorRegistry empty;
  auto obs = collect_assist_observations(plan, *plan.find("TC-NET-006@nw-https"), empty);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].kind(), ObservationKind::Text);
  auto stubbed = collect_assist_observations(plan, *plan.find("TC-NET-006@nw-https"), stub_registry());
  ASSERT_EQ(stubbed.size(), 1u);
  EXPECT_EQ(stubbed[0].kind(), ObservationKind::TlsPosture);
}

TEST(ProtocolDocument, RoundTripsRandomProtocols) {
  iotsam::testing::Rng rng(5150);
  for (int i = 0; i < 100; ++i) {
    auto plan = iotsam::testing::random_plan(rng);
    for (const auto& p : iotsam::testing::random_protocols(rng, plan)) {
      auto bytes = serialize_protocol(p);
      ASSERT_EQ(parse_protocol(bytes), p);
      ASSERT_EQ(serialize_protocol(parse_protocol(bytes)), bytes);
    }
  }
}

TEST(ProtocolDocument, RejectsManualErrorAndBadObservations) {
  auto plan = bundled_plan();
  auto p = record_manual_result(plan, *plan.find("TC-PHY-002@port-usb"), "bob", {{}, {}}, Outcome::Fail, "shell");
  auto doc = json_io::parse_text(serialize_protocol(p));
  auto manual_error = doc;
  manual_error["outcome"] = "ERROR";
  EXPECT_THROW(parse_protocol(manual_error.dump()), Error);

  auto reversed = doc;
  reversed["ended-at"] = "2000-01-01T00:00:00.000000Z";
  EXPECT_THROW(parse_protocol(reversed.dump()), Error);

  Observation ports{PortListPayload{"h", 1, 100, {80, 23}}, iotsam::testing::fixed_time()};
  auto bad_ports = doc;
  bad_ports["steps-performed"][0]["observations"] = json_io::Json::array({to_json(ports)});
  EXPECT_THROW(parse_protocol(bad_ports.dump()), Error);
}

}  // namespace
