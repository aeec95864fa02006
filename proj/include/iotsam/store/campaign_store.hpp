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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iotsam/assessment/assessment.hpp"
#include "iotsam/filter/plan.hpp"
#include "iotsam/harness/protocol.hpp"
#include "iotsam/model/types.hpp"

namespace iotsam::store {

enum class SessionState { Planned, Executing, AwaitingManual, Assessed };

inline constexpr std::string_view kRecordKind = "store-record";
inline constexpr std::string_view kExecutionStartedKind = "execution-started";
inline constexpr const char* kStoreEnvVar = "IOTSAM_STORE";

struct RecordInfo {
  std::uint64_t sequence = 0;
  std::string kind;
  Timestamp appended_at{};
  std::string digest;
  bool operator==(const RecordInfo&) const = default;
};

struct Session {
  std::string session_id;
  SessionState state = SessionState::Planned;
  model::DeviceModel device;
  model::TestingProfile profile;
  model::TestCaseCatalog catalog;
  filter::TestPlan plan;
  std::vector<harness::ExecutionProtocol> protocols;  // append order
  std::optional<assessment::OverallVerdict> verdict;
  std::vector<RecordInfo> log;

  const harness::ExecutionProtocol* protocol_for(std::string_view plan_entry_id) const;
  std::vector<filter::PlannedTest> pending_automated() const;
  /// MANUAL and SEMI_AUTOMATED entries without a protocol, plan order.
  std::vector<filter::PlannedTest> pending_manual() const;
  bool all_covered() const;

  bool operator==(const Session&) const = default;
};

/// Flat-file, append-only session store: one directory per session holding
/// NNNN-<kind>.json records, each chained to its predecessor by SHA-256.
/// Writers serialize on a per-session lock file; readers never lock.
class CampaignStore {
 public:
  /// Creates the root directory if needed.
  explicit CampaignStore(std::filesystem::path root, Clock clock = system_clock());

  /// `flag` if given, else $IOTSAM_STORE, else ./iotsam-store.
  static std::filesystem::path resolve_root(const std::optional<std::string>& flag);

  const std::filesystem::path& root() const { return root_; }

  /// INCONSISTENT_REFERENCES when the plan does not belong to the other
  /// three documents.
  std::string create_session(const model::DeviceModel& device, const model::TestingProfile& profile,
                             const model::TestCaseCatalog& catalog, const filter::TestPlan& plan);

  /// NOT_FOUND, CORRUPT_LOG.
  Session load_session(const std::string& session_id) const;
  /// Ids in creation order.
  std::vector<std::string> list_sessions() const;

  /// PLANNED -> EXECUTING. WRONG_STATE from any other state.
  SessionState begin_execution(const std::string& session_id);

  /// WRONG_STATE unless EXECUTING or AWAITING_MANUAL; DUPLICATE_ENTRY if the
  /// entry already has a protocol; INCONSISTENT_REFERENCES if the protocol
  /// names another plan or an unknown entry.
  SessionState append_protocol(const std::string& session_id, const harness::ExecutionProtocol& protocol);

  /// Aggregates and records the verdict; the session becomes ASSESSED.
  /// WRONG_STATE before execution started, while entries are pending, or
  /// when already assessed.
  assessment::OverallVerdict assess(const std::string& session_id, const model::AssessmentScheme& scheme);

  std::filesystem::path session_directory(const std::string& session_id) const;

 private:
  std::filesystem::path root_;
  Clock clock_;
};

}  // namespace iotsam::store

namespace iotsam::model {

template <>
struct EnumTraits<store::SessionState> {
  static constexpr std::array entries{
      std::pair{store::SessionState::Planned, std::string_view{"PLANNED"}},
      std::pair{store::SessionState::Executing, std::string_view{"EXECUTING"}},
      std::pair{store::SessionState::AwaitingManual, std::string_view{"AWAITING_MANUAL"}},
      std::pair{store::SessionState::Assessed, std::string_view{"ASSESSED"}},
  };
};

}  // namespace iotsam::model
