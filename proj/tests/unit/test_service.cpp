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
#include <thread>

#include "httplib.h"
#include "generators.hpp"
#include "iotsam/assessment/assessment.hpp"
#include "iotsam/harness/protocol.hpp"
#include "iotsam/mock/mock_device.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/probes/probes.hpp"
#include "iotsam/service/api_server.hpp"
#include "process.hpp"

namespace {

using namespace iotsam;
using json_io::Json;
using iotsam::testing::fixture_path;
using iotsam::testing::read_file;
using iotsam::testing::TempDir;

harness::ExecutorRegistry stub_registry() {
  harness::ExecutorRegistry real;
  probes::register_network_probes(real);
  harness::ExecutorRegistry stub;
  for (const auto& d : real.list()) {
    stub.register_executor(
        d,
        [](const harness::ExecutionContext& ctx) {
          harness::Observation o = harness::text_observation("stub " + ctx.plan_entry_id);
          if (ctx.case_id == "TC-NET-001") o.payload = harness::PortListPayload{"h", 1, 1024, {23}};
          return std::vector<harness::PerformedStep>{{"stub", {o}}};
        },
        [](std::string_view case_id, std::span<const harness::Observation>) {
          return harness::Verdict{case_id == "TC-NET-001" ? harness::Outcome::Fail : harness::Outcome::Pass, "stub"};
        });
  }
  return stub;
}

Json create_body() {
  Json body = Json::object();
  body["device-model"] = json_io::parse_text(read_file(fixture_path("smart-lock.devicemodel.json")));
  body["testing-profile"] = json_io::parse_text(read_file(fixture_path("lab.profile.json")));
  body["test-catalog"] = json_io::parse_text(read_file(fixture_path("mini.catalog.json")));
  return body;
}

Json manual_body(const std::string& entry, int steps, const char* outcome = "PASS") {
  Json obs = Json::array();
  for (int i = 0; i < steps; ++i) obs.push_back(Json::array({"observed step " + std::to_string(i + 1)}));
  return Json{{"plan-entry-id", entry}, {"assessor-id", "alice"}, {"step-observations", obs},
              {"outcome", outcome}, {"rationale", "checked"}};
}

std::string encode(const std::string& entry) {
  std::string out;
  for (char c : entry) out += c == '@' ? std::string("%40") : std::string(1, c);
  return out;
}

class ServiceTest : public ::testing::Test {
 protected:
  TempDir dir;
  std::unique_ptr<service::ApiServer> server;
  std::unique_ptr<httplib::Client> client;

  void start(harness::ExecutorRegistry registry) {
    service::ServiceOptions options;
    options.store_root = dir.path() / "store";
    options.port = 0;
    options.schemes = {model::parse_as<model::AssessmentScheme>(read_file(fixture_path("lab.scheme.json"))),
                       model::parse_as<model::AssessmentScheme>(read_file(fixture_path("lenient.scheme.json")))};
    server = std::make_unique<service::ApiServer>(std::move(options), std::move(registry));
    int port = server->start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(120, 0);
  }

  void TearDown() override {
    if (server) server->stop();
  }

  std::string create() {
    auto res = client->Post("/api/v1/sessions", create_body().dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201) << res->body;
    EXPECT_EQ(res->get_header_value("Location").rfind("/api/v1/sessions/", 0), 0u);
    return Json::parse(res->body)["session-id"];
  }

  std::string execute(const std::string& id) {
    auto res = client->Post("/api/v1/sessions/" + id + "/execute-automated", "", "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200) << res->body;
    return res ? res->body : "";
  }

  Json get(const std::string& path, int expected = 200) {
    auto res = client->Get(path);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, expected) << path << ": " << res->body;
    return Json::parse(res->body);
  }

  httplib::Result post_manual(const std::string& id, const Json& body) {
    return client->Post("/api/v1/sessions/" + id + "/manual-results", body.dump(), "application/json");
  }
};

TEST_F(ServiceTest, ExecutorsAndEmptySessionList) {
  start(stub_registry());
  auto executors = get("/api/v1/executors");
  EXPECT_EQ(executors["executors"].size(), 4u);
  EXPECT_TRUE(get("/api/v1/sessions")["sessions"].empty());
}

TEST_F(ServiceTest, CreateFromMultipart) {
  start(stub_registry());
  httplib::MultipartFormDataItems items{
      {"device-model", read_file(fixture_path("smart-lock.devicemodel.json")), "device.json", "application/json"},
      {"testing-profile", read_file(fixture_path("lab.profile.json")), "profile.json", "application/json"},
      {"test-catalog", read_file(fixture_path("mini.catalog.json")), "catalog.json", "application/json"}};
  auto res = client->Post("/api/v1/sessions", items);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201) << res->body;
  auto summary = Json::parse(res->body);
  EXPECT_EQ(summary["state"], "PLANNED");
  EXPECT_EQ(summary["entries"], 9);
  auto plan = client->Get("/api/v1/sessions/" + summary["session-id"].get<std::string>() + "/plan");
  ASSERT_TRUE(plan);
  EXPECT_EQ(filter::parse_plan(plan->body).entries.size(), 9u);
}

TEST_F(ServiceTest, ErrorsMapToStatusCodes) {
  start(stub_registry());
  auto missing = get("/api/v1/sessions/s0999-00000000", 404);
  EXPECT_EQ(missing["code"], "NOT_FOUND");
  auto bad = client->Post("/api/v1/sessions", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(Json::parse(bad->body)["code"], "SYNTAX");
  Json wrong = create_body();
  wrong["test-catalog"]["cases"][1]["case-id"] = "TC-NET-001";
  auto dup = client->Post("/api/v1/sessions", wrong.dump(), "application/json");
  ASSERT_TRUE(dup);
  EXPECT_EQ(dup->status, 400);
  EXPECT_EQ(Json::parse(dup->body)["code"], "INVARIANT");
  EXPECT_EQ(service::http_status_for(ErrorCode::WrongState), 409);
  EXPECT_EQ(service::http_status_for(ErrorCode::DuplicateEntry), 409);
  EXPECT_EQ(service::http_status_for(ErrorCode::CorruptLog), 500);
  EXPECT_EQ(service::http_status_for(ErrorCode::StepCountMismatch), 400);
}

TEST_F(ServiceTest, ManualFlowWithConflictsAndAssessment) {
  start(stub_registry());
  auto id = create();

  auto early = client->Post("/api/v1/sessions/" + id + "/assess?scheme-id=lab-default", "", "application/json");
  ASSERT_TRUE(early);
  EXPECT_EQ(early->status, 409) << early->body;

  auto events = execute(id);
  EXPECT_NE(events.find("event: started"), std::string::npos);
  EXPECT_EQ(std::count(events.begin(), events.end(), '\n') > 0, true);
  std::size_t protocol_events = 0;
  for (auto pos = events.find("event: protocol"); pos != std::string::npos; pos = events.find("event: protocol", pos + 1)) {
    ++protocol_events;
  }
  EXPECT_EQ(protocol_events, 5u);
  EXPECT_NE(events.find("event: done"), std::string::npos);

  auto pending = get("/api/v1/sessions/" + id + "/pending-manual");
  ASSERT_EQ(pending["entries"].size(), 4u);
  EXPECT_EQ(get("/api/v1/sessions/" + id)["state"], "AWAITING_MANUAL");

  auto mismatch = post_manual(id, manual_body("TC-WL-001@radio-ble", 2));
  ASSERT_TRUE(mismatch);
  EXPECT_EQ(mismatch->status, 400);
  EXPECT_EQ(Json::parse(mismatch->body)["code"], "STEP_COUNT_MISMATCH");

  auto reserved = post_manual(id, manual_body("TC-WL-001@radio-ble", 3, "ERROR"));
  ASSERT_TRUE(reserved);
  EXPECT_EQ(reserved->status, 400);

  auto early_report = get("/api/v1/sessions/" + id + "/report", 409);
  EXPECT_EQ(early_report["code"], "WRONG_STATE");

  auto before = post_manual(id, manual_body("TC-NET-006@nw-https", 2));
  ASSERT_TRUE(before);
  EXPECT_EQ(before->status, 201) << before->body;
  EXPECT_EQ(harness::parse_protocol(before->body).plan_entry_id, "TC-NET-006@nw-https");

  // Two concurrent submissions for the same entry: one wins.
  std::vector<int> statuses(2);
  {
    std::vector<std::jthread> tabs;
    for (int i = 0; i < 2; ++i) {
      tabs.emplace_back([&, i] {
        httplib::Client c(client->host(), client->port());
        auto r = c.Post("/api/v1/sessions/" + id + "/manual-results", manual_body("TC-WL-001@radio-ble", 3).dump(),
                        "application/json");
        statuses[static_cast<std::size_t>(i)] = r ? r->status : -1;
      });
    }
  }
  std::sort(statuses.begin(), statuses.end());
  EXPECT_EQ(statuses, (std::vector<int>{201, 409}));

  auto assist = client->Post("/api/v1/sessions/" + id + "/entries/" + encode("TC-UPD-001@fw-main") + "/assist", "",
                             "application/json");
  ASSERT_TRUE(assist);
  EXPECT_EQ(assist->status, 200) << assist->body;
  EXPECT_EQ(Json::parse(assist->body)["observations"].size(), 1u);

  for (const auto& [entry, steps] : std::vector<std::pair<std::string, int>>{{"TC-UPD-001@fw-main", 2}, {"TC-PHY-002@port-usb", 2}}) {
    auto r = post_manual(id, manual_body(entry, steps));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 201) << r->body;
  }
  EXPECT_TRUE(get("/api/v1/sessions/" + id)["all-covered"].get<bool>());

  auto ambiguous = client->Post("/api/v1/sessions/" + id + "/assess", "", "application/json");
  ASSERT_TRUE(ambiguous);
  EXPECT_EQ(ambiguous->status, 400);

  auto assessed = client->Post("/api/v1/sessions/" + id + "/assess?scheme-id=lab-default", "", "application/json");
  ASSERT_TRUE(assessed);
  ASSERT_EQ(assessed->status, 200) << assessed->body;
  auto verdict = assessment::parse_verdict(assessed->body);
  EXPECT_EQ(verdict.result, assessment::OverallResult::Insecure);

  auto again = client->Post("/api/v1/sessions/" + id + "/assess?scheme-id=lab-default", "", "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 409);

  auto report = client->Get("/api/v1/sessions/" + id + "/report?format=text");
  ASSERT_TRUE(report);
  EXPECT_EQ(report->status, 200);
  EXPECT_NE(report->body.find("RESULT: INSECURE"), std::string::npos);
  auto machine = client->Get("/api/v1/sessions/" + id + "/report");
  ASSERT_TRUE(machine);
  EXPECT_EQ(assessment::parse_report(machine->body).overall, verdict);
  EXPECT_EQ(get("/api/v1/sessions/" + id + "/protocols")["protocols"].size(), 9u);
}

TEST_F(ServiceTest, FixtureRunLeavesFourPendingManualEntries) {
  harness::ExecutorRegistry registry;
  probes::register_network_probes(registry);
  start(std::move(registry));
  mock::MockDevice device(mock::parse_mock_config(read_file(fixture_path("insecure-lock.mock.json"))));
  auto id = create();
  auto events = execute(id);
  EXPECT_NE(events.find("event: done"), std::string::npos) << events;
  auto pending = get("/api/v1/sessions/" + id + "/pending-manual");
  EXPECT_EQ(pending["entries"].size(), 4u);
  auto protocols = get("/api/v1/sessions/" + id + "/protocols")["protocols"];
  ASSERT_EQ(protocols.size(), 5u);
  std::vector<std::string> fails;
  for (const auto& p : protocols) {
    if (p["outcome"] == "FAIL") fails.push_back(p["case-id"]);
  }
  std::sort(fails.begin(), fails.end());
  EXPECT_EQ(fails, (std::vector<std::string>{"TC-NET-001", "TC-NET-003", "TC-NET-004"}));
}

TEST(ManualSubmission, StringsBecomeTextObservations) {
  auto s = service::manual_submission_from_json(manual_body("TC-X@c", 2), iotsam::testing::fixed_clock());
  EXPECT_EQ(s.step_observations.size(), 2u);
  EXPECT_EQ(s.step_observations[0][0].kind(), harness::ObservationKind::Text);
  Json bad = manual_body("TC-X@c", 1);
  bad["extra"] = 1;
  EXPECT_THROW(service::manual_submission_from_json(bad), Error);
}

TEST(ListenParsing, HostAndPort) {
  EXPECT_EQ(service::parse_listen("127.0.0.1:8660"), (std::pair<std::string, int>{"127.0.0.1", 8660}));
  EXPECT_THROW(service::parse_listen("8660"), Error);
  EXPECT_THROW(service::parse_listen("host:99999"), Error);
}

}  // namespace
