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

#include <filesystem>

#include "iotsam/assessment/report.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/mock/mock_device.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/store/campaign_store.hpp"
#include "process.hpp"

namespace {

namespace fs = std::filesystem;
using iotsam::testing::cli_path;
using iotsam::testing::fixture_path;
using iotsam::testing::read_file;
using iotsam::testing::run_process;
using iotsam::testing::TempDir;

std::string fx(const char* name) { return fixture_path(name).string(); }

iotsam::testing::ProcessResult cli(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), cli_path());
  return run_process(args, input);
}

// One observation line per guide step, then outcome and rationale, for the
// four pending entries of the bundled plan in prompt order.
std::string manual_answers(const char* outcome = "PASS") {
  std::string o = outcome;
  return "proxy saw the app\napp aborted\n" + o + "\ncertificate validated\n"
         "fetched over tls\nimage rejected\n" + o + "\nupdate verified\n"
         "advertising\nrefused\nLESC passkey\n" + o + "\npairing protected\n"
         "charging only\nno prompt\n" + o + "\nno shell\n";
}

TEST(CliValidate, ValidFixturesExitZero) {
  auto r = cli({"validate", fx("smart-lock.devicemodel.json"), fx("lab.profile.json"), fx("mini.catalog.json"),
                fx("lab.scheme.json")});
  EXPECT_EQ(r.exit_code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("OK"), std::string::npos);
}

TEST(CliValidate, DuplicateCaseIdExitOneNamesId) {
  TempDir dir;
  auto doc = iotsam::json_io::parse_text(read_file(fixture_path("mini.catalog.json")));
  doc["cases"][3]["case-id"] = "TC-NET-001";
  auto path = dir.path() / "dup.catalog.json";
  iotsam::testing::write_file(path, doc.dump(2));
  auto r = cli({"validate", "--file", path.string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE((r.out + r.err).find("TC-NET-001"), std::string::npos) << r.out << r.err;
  EXPECT_NE((r.out + r.err).find("INVARIANT"), std::string::npos);
}

TEST(CliValidate, MissingFileExitTwo) {
  auto r = cli({"validate", "/nonexistent/device.json"});
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliPlan, BundledFixturesGiveNineEntryPlan) {
  TempDir dir;
  auto out = dir.path() / "lock.plan.json";
  auto r = cli({"plan", "--device", fx("smart-lock.devicemodel.json"), "--profile", fx("lab.profile.json"),
                "--catalog", fx("mini.catalog.json"), "--out", out.string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto plan = iotsam::filter::parse_plan(read_file(out));
  EXPECT_EQ(plan.entries.size(), 9u);
  EXPECT_NE(r.out.find("AUTOMATED: 5/9"), std::string::npos) << r.out;
  auto v = cli({"validate", out.string()});
  EXPECT_EQ(v.exit_code, 0) << v.out;
}

TEST(CliPlan, EmptyCatalogWarns) {
  auto r = cli({"plan", "--device", fx("smart-lock.devicemodel.json"), "--profile", fx("lab.profile.json"),
                "--catalog", fx("empty.catalog.json")});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(iotsam::filter::parse_plan(r.out).entries.size(), 0u);
  EXPECT_NE(r.err.find("warning"), std::string::npos) << r.err;
}

TEST(CliPlan, UnwritableOutputExitOne) {
  auto r = cli({"plan", "--device", fx("smart-lock.devicemodel.json"), "--profile", fx("lab.profile.json"),
                "--catalog", fx("mini.catalog.json"), "--out", "/nonexistent-dir/plan.json"});
  EXPECT_EQ(r.exit_code, 1);
}

TEST(CliPlan, MissingRequiredOptionIsUsageError) {
  auto r = cli({"plan", "--device", fx("smart-lock.devicemodel.json")});
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliRun, NeedsSessionOrDocuments) {
  TempDir dir;
  auto r = cli({"run", "--store", dir.path().string()});
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliAssess, BeforeAnyProtocolsIsWrongState) {
  TempDir dir;
  auto store_root = dir.path() / "store";
  auto device = iotsam::model::parse_as<iotsam::model::DeviceModel>(read_file(fixture_path("smart-lock.devicemodel.json")));
  auto profile = iotsam::model::parse_as<iotsam::model::TestingProfile>(read_file(fixture_path("lab.profile.json")));
  auto catalog = iotsam::model::parse_as<iotsam::model::TestCaseCatalog>(read_file(fixture_path("mini.catalog.json")));
  iotsam::store::CampaignStore store(store_root);
  auto id = store.create_session(device, profile, catalog, iotsam::filter::filter_catalog(catalog, device, profile));

  auto r = cli({"assess", "--store", store_root.string(), "--session-id", id, "--scheme", fx("lab.scheme.json")});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("WRONG_STATE"), std::string::npos) << r.err;

  auto missing = cli({"assess", "--store", store_root.string(), "--session-id", "s0042-00000000", "--scheme",
                      fx("lab.scheme.json")});
  EXPECT_EQ(missing.exit_code, 1);
  EXPECT_NE(missing.err.find("NOT_FOUND"), std::string::npos) << missing.err;
}

TEST(CliCampaign, FullScriptedCampaign) {
  auto mock = iotsam::mock::parse_mock_config(read_file(fixture_path("insecure-lock.mock.json")));
  iotsam::mock::MockDevice device(mock);
  TempDir dir;
  auto store = (dir.path() / "store").string();

  auto run = cli({"run", "--store", store, "--device", fx("smart-lock.devicemodel.json"), "--profile",
                  fx("lab.profile.json"), "--catalog", fx("mini.catalog.json")});
  ASSERT_EQ(run.exit_code, 0) << run.out << run.err;
  auto pos = run.out.find("session: ");
  ASSERT_NE(pos, std::string::npos);
  auto id = run.out.substr(pos + 9, run.out.find('\n', pos) - pos - 9);
  EXPECT_NE(run.out.find("AWAITING_MANUAL"), std::string::npos) << run.out;

  auto early = cli({"assess", "--store", store, "--session-id", id, "--scheme", fx("lab.scheme.json")});
  EXPECT_EQ(early.exit_code, 1);
  EXPECT_NE(early.err.find("WRONG_STATE"), std::string::npos) << early.err;

  auto early_report = cli({"report", "--store", store, "--session-id", id});
  EXPECT_EQ(early_report.exit_code, 1);

  auto manual = cli({"run", "--store", store, "--session-id", id, "--interactive", "--assessor", "alice"},
                    manual_answers());
  ASSERT_EQ(manual.exit_code, 0) << manual.out << manual.err;
  EXPECT_NE(manual.out.find("9/9"), std::string::npos) << manual.out;

  auto assess = cli({"assess", "--store", store, "--session-id", id, "--scheme", fx("lab.scheme.json"), "--out",
                     (dir.path() / "verdict.json").string()});
  EXPECT_EQ(assess.exit_code, 3) << assess.out << assess.err;
  EXPECT_NE(assess.out.find("RESULT: INSECURE"), std::string::npos);

  // Re-assessing with the same scheme reports the stored verdict.
  auto again = cli({"assess", "--store", store, "--session-id", id, "--scheme", fx("lab.scheme.json")});
  EXPECT_EQ(again.exit_code, 3) << again.err;

  auto machine_path = dir.path() / "report.json";
  auto machine = cli({"report", "--store", store, "--session-id", id, "--format", "machine", "--out",
                      machine_path.string()});
  ASSERT_EQ(machine.exit_code, 0) << machine.err;
  auto validate = cli({"validate", machine_path.string(), (dir.path() / "verdict.json").string()});
  EXPECT_EQ(validate.exit_code, 0) << validate.out;
  auto report = iotsam::assessment::parse_report(read_file(machine_path));
  EXPECT_EQ(report.overall.result, iotsam::assessment::OverallResult::Insecure);

  auto text = cli({"report", "--store", store, "--session-id", id, "--format", "text"});
  ASSERT_EQ(text.exit_code, 0);
  EXPECT_NE(text.out.find("Failed cases (3)"), std::string::npos) << text.out;
}

}  // namespace
