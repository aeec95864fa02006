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
#include <filesystem>
#include <thread>

#include "generators.hpp"
#include "iotsam/error.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/harness/harness.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/store/campaign_store.hpp"
#include "iotsam/store/documents.hpp"
#include "process.hpp"

namespace {

namespace fs = std::filesystem;
using namespace iotsam;
using namespace iotsam::store;
using harness::Outcome;
using iotsam::testing::fixture_path;
using iotsam::testing::read_file;
using iotsam::testing::TempDir;

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an iotsam::Error";
  return ErrorCode::Io;
}

struct Inputs {
  model::DeviceModel device = model::parse_as<model::DeviceModel>(read_file(fixture_path("smart-lock.devicemodel.json")));
  model::TestingProfile profile = model::parse_as<model::TestingProfile>(read_file(fixture_path("lab.profile.json")));
  model::TestCaseCatalog catalog = model::parse_as<model::TestCaseCatalog>(read_file(fixture_path("mini.catalog.json")));
  model::AssessmentScheme scheme = model::parse_as<model::AssessmentScheme>(read_file(fixture_path("lab.scheme.json")));
  filter::TestPlan plan = filter::filter_catalog(catalog, device, profile, iotsam::testing::fixed_clock());
};

harness::ExecutionProtocol protocol_for(const filter::TestPlan& plan, const filter::PlannedTest& e,
                                        Outcome outcome = Outcome::Pass) {
  if (e.mode != model::ExecutionMode::Automated) {
    std::vector<std::vector<harness::Observation>> steps(e.guide.size());
    return harness::record_manual_result(plan, e, "alice", steps, outcome, "checked", iotsam::testing::fixed_clock());
  }
  harness::ExecutionProtocol p;
  p.protocol_id = harness::protocol_id_for(e.entry_id);
  p.plan_id = plan.plan_id;
  p.plan_entry_id = e.entry_id;
  p.case_id = e.case_id;
  p.executor = {e.executor->capability, "1.0.0", ""};
  p.started_at = p.ended_at = iotsam::testing::fixed_time();
  p.outcome = outcome;
  p.rationale = "stub";
  return p;
}

class StoreTest : public ::testing::Test {
 protected:
  TempDir dir;
  Inputs in;
  CampaignStore store{dir.path() / "store", iotsam::testing::fixed_clock()};

  std::string fresh() { return store.create_session(in.device, in.profile, in.catalog, in.plan); }

  void complete(const std::string& id) {
    store.begin_execution(id);
    for (const auto& e : in.plan.entries) store.append_protocol(id, protocol_for(in.plan, e));
  }
};

TEST_F(StoreTest, CreateAndLoadRoundTrip) {
  auto id = fresh();
  auto s = store.load_session(id);
  EXPECT_EQ(s.session_id, id);
  EXPECT_EQ(s.state, SessionState::Planned);
  EXPECT_EQ(s.device, in.device);
  EXPECT_EQ(s.profile, in.profile);
  EXPECT_EQ(s.catalog, in.catalog);
  EXPECT_EQ(s.plan, in.plan);
  EXPECT_TRUE(s.protocols.empty());
  ASSERT_EQ(s.log.size(), 4u);
  EXPECT_EQ(s.log[0].kind, "device-model");
  EXPECT_EQ(s.log[3].kind, "test-plan");
  EXPECT_EQ(s.pending_automated().size(), 5u);
  EXPECT_EQ(s.pending_manual().size(), 4u);
}

TEST_F(StoreTest, InconsistentPlanRejected) {
  auto plan = in.plan;
  plan.device_id = "other-device";
  EXPECT_EQ(error_code_of([&] { store.create_session(in.device, in.profile, in.catalog, plan); }),
            ErrorCode::InconsistentReferences);
  EXPECT_TRUE(store.list_sessions().empty());
}

TEST_F(StoreTest, IdsAreDistinctAndListedInCreationOrder) {
  auto a = fresh();
  auto b = fresh();
  auto c = fresh();
  EXPECT_NE(a, b);
  EXPECT_NE(b, c);
  EXPECT_EQ(store.list_sessions(), (std::vector<std::string>{a, b, c}));
}

TEST_F(StoreTest, StateMachineWalkthrough) {
  auto id = fresh();
  EXPECT_EQ(error_code_of([&] { store.append_protocol(id, protocol_for(in.plan, in.plan.entries[0])); }),
            ErrorCode::WrongState);
  EXPECT_EQ(error_code_of([&] { store.assess(id, in.scheme); }), ErrorCode::WrongState);
  EXPECT_EQ(store.begin_execution(id), SessionState::Executing);
  EXPECT_EQ(error_code_of([&] { store.begin_execution(id); }), ErrorCode::WrongState);

  SessionState state = SessionState::Executing;
  for (const auto& e : in.plan.entries) {
    if (e.mode == model::ExecutionMode::Automated) state = store.append_protocol(id, protocol_for(in.plan, e));
  }
  EXPECT_EQ(state, SessionState::AwaitingManual);
  EXPECT_EQ(error_code_of([&] { store.assess(id, in.scheme); }), ErrorCode::WrongState);
  EXPECT_FALSE(store.load_session(id).all_covered());

  for (const auto& e : in.plan.entries) {
    if (e.mode != model::ExecutionMode::Automated) store.append_protocol(id, protocol_for(in.plan, e));
  }
  auto s = store.load_session(id);
  EXPECT_TRUE(s.all_covered());
  EXPECT_TRUE(s.pending_manual().empty());

  auto verdict = store.assess(id, in.scheme);
  EXPECT_EQ(verdict.result, assessment::OverallResult::Secure);
  auto assessed = store.load_session(id);
  EXPECT_EQ(assessed.state, SessionState::Assessed);
  ASSERT_TRUE(assessed.verdict);
  EXPECT_EQ(*assessed.verdict, verdict);
  EXPECT_EQ(error_code_of([&] { store.append_protocol(id, protocol_for(in.plan, in.plan.entries[0])); }),
            ErrorCode::WrongState);
  EXPECT_EQ(error_code_of([&] { store.assess(id, in.scheme); }), ErrorCode::WrongState);
}

TEST_F(StoreTest, DuplicateEntryRejected) {
  auto id = fresh();
  store.begin_execution(id);
  store.append_protocol(id, protocol_for(in.plan, in.plan.entries[0]));
  EXPECT_EQ(error_code_of([&] { store.append_protocol(id, protocol_for(in.plan, in.plan.entries[0], Outcome::Fail)); }),
            ErrorCode::DuplicateEntry);
}

TEST_F(StoreTest, ForeignProtocolRejected) {
  auto id = fresh();
  store.begin_execution(id);
  auto p = protocol_for(in.plan, in.plan.entries[0]);
  p.plan_id = "plan-elsewhere";
  EXPECT_EQ(error_code_of([&] { store.append_protocol(id, p); }), ErrorCode::InconsistentReferences);
  auto q = protocol_for(in.plan, in.plan.entries[0]);
  q.plan_entry_id = "TC-NOPE@x";
  EXPECT_EQ(error_code_of([&] { store.append_protocol(id, q); }), ErrorCode::InconsistentReferences);
}

TEST_F(StoreTest, ConcurrentDuplicateAppendsYieldOneWinner) {
  auto id = fresh();
  store.begin_execution(id);
  const auto& entry = *in.plan.find("TC-WL-001@radio-ble");
  std::atomic<int> ok{0}, dup{0};
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      CampaignStore own(store.root(), iotsam::testing::fixed_clock());
      try {
        own.append_protocol(id, protocol_for(in.plan, entry));
        ++ok;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::DuplicateEntry) ++dup;
      }
    });
  }
  threads.clear();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(dup.load(), 7);
  EXPECT_EQ(store.load_session(id).protocols.size(), 1u);
}

TEST_F(StoreTest, UnknownSessionIsNotFound) {
  EXPECT_EQ(error_code_of([&] { store.load_session("s9999-deadbeef"); }), ErrorCode::NotFound);
  EXPECT_EQ(error_code_of([&] { store.load_session("../etc"); }), ErrorCode::NotFound);
}

std::vector<fs::path> records(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST_F(StoreTest, TruncatedLogIsCorrupt) {
  auto id = fresh();
  complete(id);
  auto files = records(store.session_directory(id));
  ASSERT_EQ(files.size(), 4u + 1u + 9u);
  auto last = files.back();
  auto size = fs::file_size(last);
  fs::resize_file(last, size / 2);
  EXPECT_EQ(error_code_of([&] { store.load_session(id); }), ErrorCode::CorruptLog);
}

TEST_F(StoreTest, TamperedRecordIsCorrupt) {
  auto id = fresh();
  complete(id);
  auto files = records(store.session_directory(id));
  auto bytes = read_file(files[6]);
  auto pos = bytes.find("\"PASS\"");
  ASSERT_NE(pos, std::string::npos);
  bytes.replace(pos, 6, "\"FAIL\"");
  iotsam::testing::write_file(files[6], bytes);
  EXPECT_EQ(error_code_of([&] { store.load_session(id); }), ErrorCode::CorruptLog);
}

TEST_F(StoreTest, MissingRecordIsCorrupt) {
  auto id = fresh();
  complete(id);
  auto files = records(store.session_directory(id));
  fs::remove(files[5]);
  EXPECT_EQ(error_code_of([&] { store.load_session(id); }), ErrorCode::CorruptLog);
}

TEST_F(StoreTest, RecordsValidateAsDocuments) {
  auto id = fresh();
  complete(id);
  store.assess(id, in.scheme);
  for (const auto& f : records(store.session_directory(id))) {
    EXPECT_EQ(validate_document(read_file(f)), "store-record") << f;
  }
}

TEST(StoreRoot, Resolution) {
  EXPECT_EQ(CampaignStore::resolve_root(std::string("/x/y")), fs::path("/x/y"));
  ::setenv(kStoreEnvVar, "/env/store", 1);
  EXPECT_EQ(CampaignStore::resolve_root(std::nullopt), fs::path("/env/store"));
  ::unsetenv(kStoreEnvVar);
  EXPECT_EQ(CampaignStore::resolve_root(std::nullopt).filename(), "iotsam-store");
}

TEST(ValidateDocument, KnowsEveryKind) {
  auto kinds = known_document_kinds();
  EXPECT_GE(kinds.size(), 8u);
  EXPECT_EQ(validate_document(read_file(fixture_path("mini.catalog.json"))), "test-catalog");
  EXPECT_EQ(error_code_of([] { validate_document(R"({"kind":"unknown","schema-version":"1"})"); }), ErrorCode::Schema);
  EXPECT_EQ(error_code_of([] { validate_document("not json"); }), ErrorCode::Syntax);
}

}  // namespace
