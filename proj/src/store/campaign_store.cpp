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

#include "iotsam/store/campaign_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "iotsam/digest.hpp"
#include "iotsam/model/document.hpp"

namespace iotsam::store {

namespace fs = std::filesystem;
using json_io::Json;
using json_io::ObjectReader;

namespace {

const std::string kGenesisDigest(64, '0');
constexpr const char* kLockFile = ".lock";

const std::regex& session_pattern() {
  static const std::regex re(R"(s(\d{4,})-[0-9a-f]{8})");
  return re;
}

const std::regex& record_pattern() {
  static const std::regex re(R"((\d{4,})-([a-z][a-z-]*)\.json)");
  return re;
}

class FileLock {
 public:
  explicit FileLock(const fs::path& file) {
    fd_ = ::open(file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open lock file " + file.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorCode::Io, "cannot lock " + file.string());
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

void sync_path(const fs::path& path, int flags) {
  int fd = ::open(path.c_str(), flags | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

void write_durably(const fs::path& target, const std::string& bytes) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << bytes;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  }
  sync_path(tmp, O_RDONLY);
  fs::rename(tmp, target);
  sync_path(target.parent_path(), O_RDONLY | O_DIRECTORY);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string record_file_name(std::uint64_t sequence, std::string_view kind) {
  char prefix[32];
  std::snprintf(prefix, sizeof prefix, "%04llu-", static_cast<unsigned long long>(sequence));
  return prefix + std::string(kind) + ".json";
}

std::string record_digest(const Json& record_without_digest) {
  return sha256_hex(json_io::canonical(record_without_digest));
}

Json make_record(std::uint64_t sequence, std::string_view kind, Timestamp at,
                 const std::string& previous, Json document) {
  Json record = json_io::envelope(kRecordKind);
  record["sequence"] = sequence;
  record["record-kind"] = std::string(kind);
  record["appended-at"] = format_timestamp(at);
  record["previous-digest"] = previous;
  record["document"] = std::move(document);
  std::string digest = record_digest(record);
  record["digest"] = std::move(digest);
  return record;
}

std::string random_suffix() {
  std::random_device rd;
  std::uniform_int_distribution<std::uint32_t> dist;
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", dist(rd));
  return buf;
}

// --- replay -----------------------------------------------------------------

void check_references(const Session& s) {
  auto mismatch = [](const std::string& what) { throw Error(ErrorCode::InconsistentReferences, what); };
  const auto& plan = s.plan;
  if (plan.device_id != s.device.device_id) {
    mismatch("plan targets device '" + plan.device_id + "', supplied device is '" + s.device.device_id + "'");
  }
  if (plan.profile_id != s.profile.profile_id) {
    mismatch("plan uses profile '" + plan.profile_id + "', supplied profile is '" + s.profile.profile_id + "'");
  }
  if (plan.catalog_id != s.catalog.catalog_id || plan.catalog_version != s.catalog.version) {
    mismatch("plan comes from catalog '" + plan.catalog_id + "' " + plan.catalog_version + ", supplied catalog is '" +
             s.catalog.catalog_id + "' " + s.catalog.version);
  }
  for (const auto& entry : plan.entries) {
    const auto* tc = s.catalog.find(entry.case_id);
    if (tc == nullptr) mismatch("plan entry " + entry.entry_id + " names a case missing from the catalog");
    if (s.device.find_component(entry.target_component_id) == nullptr) {
      mismatch("plan entry " + entry.entry_id + " targets a component missing from the device");
    }
    if (tc->severity != entry.severity || tc->mode != entry.mode) {
      mismatch("plan entry " + entry.entry_id + " disagrees with its catalog case");
    }
  }
}

void update_progress(Session& s) {
  if (s.state == SessionState::Executing && s.pending_automated().empty() && !s.pending_manual().empty()) {
    s.state = SessionState::AwaitingManual;
  }
}

[[noreturn]] void wrong_state(const Session& s, std::string_view action, std::string_view hint) {
  throw Error(ErrorCode::WrongState, "session " + s.session_id + " is " + std::string(model::to_token(s.state)) +
                                         "; cannot " + std::string(action) + " (" + std::string(hint) + ")");
}

void apply_protocol(Session& s, harness::ExecutionProtocol protocol) {
  if (s.state != SessionState::Executing && s.state != SessionState::AwaitingManual) {
    wrong_state(s, "record a protocol",
                s.state == SessionState::Planned ? "start execution with `run` first" : "the session is already assessed");
  }
  const auto* entry = s.plan.find(protocol.plan_entry_id);
  if (protocol.plan_id != s.plan.plan_id || entry == nullptr || entry->case_id != protocol.case_id) {
    throw Error(ErrorCode::InconsistentReferences, "protocol " + protocol.protocol_id + " does not match an entry of plan " +
                                                       s.plan.plan_id);
  }
  if (s.protocol_for(protocol.plan_entry_id) != nullptr) {
    throw Error(ErrorCode::DuplicateEntry, "entry " + protocol.plan_entry_id + " already has a protocol");
  }
  const bool automated_entry = entry->mode == model::ExecutionMode::Automated;
  if (automated_entry == protocol.executor.is_manual()) {
    throw Error(ErrorCode::InconsistentReferences,
                "protocol " + protocol.protocol_id + " executor does not fit the entry's execution mode");
  }
  s.protocols.push_back(std::move(protocol));
  update_progress(s);
}

void apply_verdict(Session& s, assessment::OverallVerdict verdict) {
  if (s.state != SessionState::Executing && s.state != SessionState::AwaitingManual) {
    wrong_state(s, "assess", s.state == SessionState::Planned ? "run the plan first" : "already assessed");
  }
  if (!s.all_covered()) {
    wrong_state(s, "assess", std::to_string(s.pending_automated().size() + s.pending_manual().size()) +
                                 " entries still pending; finish them with `run`");
  }
  if (verdict.plan_id != s.plan.plan_id) {
    throw Error(ErrorCode::InconsistentReferences, "verdict is for another plan");
  }
  s.verdict = std::move(verdict);
  s.state = SessionState::Assessed;
}

// Applies one record document to the session under construction.
void apply(Session& s, std::uint64_t sequence, const std::string& kind, const Json& document) {
  static const std::array<std::string_view, 4> kOpening{"device-model", "testing-profile", "test-catalog",
                                                        "test-plan"};
  if (sequence <= kOpening.size()) {
    if (kind != kOpening[sequence - 1]) {
      throw Error(ErrorCode::CorruptLog, "record " + std::to_string(sequence) + " should be " +
                                             std::string(kOpening[sequence - 1]));
    }
    switch (sequence) {
      case 1: s.device = model::device_model_from_json(document); break;
      case 2: s.profile = model::testing_profile_from_json(document); break;
      case 3: s.catalog = model::catalog_from_json(document); break;
      default:
        s.plan = filter::plan_from_json(document);
        check_references(s);
        s.state = SessionState::Planned;
    }
    return;
  }
  if (kind == kExecutionStartedKind) {
    ObjectReader r(document, "");
    r.expect_envelope(kExecutionStartedKind);
    r.finish();
    if (s.state != SessionState::Planned) wrong_state(s, "start execution", "execution already started");
    s.state = SessionState::Executing;
    update_progress(s);
  } else if (kind == harness::kProtocolKind) {
    apply_protocol(s, harness::protocol_from_json(document));
  } else if (kind == assessment::kVerdictKind) {
    apply_verdict(s, assessment::verdict_from_json(document));
  } else {
    throw Error(ErrorCode::CorruptLog, "unexpected record kind '" + kind + "'");
  }
}

}  // namespace

// --- Session ------------------------------------------------------------------

const harness::ExecutionProtocol* Session::protocol_for(std::string_view plan_entry_id) const {
  for (const auto& p : protocols) {
    if (p.plan_entry_id == plan_entry_id) return &p;
  }
  return nullptr;
}

std::vector<filter::PlannedTest> Session::pending_automated() const {
  std::vector<filter::PlannedTest> out;
  for (const auto& e : plan.entries) {
    if (e.mode == model::ExecutionMode::Automated && protocol_for(e.entry_id) == nullptr) out.push_back(e);
  }
  return out;
}

std::vector<filter::PlannedTest> Session::pending_manual() const {
  std::vector<filter::PlannedTest> out;
  for (const auto& e : plan.entries) {
    if (e.mode != model::ExecutionMode::Automated && protocol_for(e.entry_id) == nullptr) out.push_back(e);
  }
  return out;
}

bool Session::all_covered() const { return protocols.size() == plan.entries.size(); }

// --- CampaignStore ------------------------------------------------------------

CampaignStore::CampaignStore(fs::path root, Clock clock) : root_(std::move(root)), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) throw Error(ErrorCode::Io, "cannot use store root " + root_.string());
}

fs::path CampaignStore::resolve_root(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kStoreEnvVar); env != nullptr && *env != '\0') return env;
  return "iotsam-store";
}

fs::path CampaignStore::session_directory(const std::string& session_id) const {
  if (!std::regex_match(session_id, session_pattern())) {
    throw Error(ErrorCode::NotFound, "no session '" + session_id + "'");
  }
  return root_ / session_id;
}

std::string CampaignStore::create_session(const model::DeviceModel& device, const model::TestingProfile& profile,
                                          const model::TestCaseCatalog& catalog, const filter::TestPlan& plan) {
  std::vector<std::pair<std::string, Json>> opening{
      {"device-model", model::to_json(device)},
      {"testing-profile", model::to_json(profile)},
      {"test-catalog", model::to_json(catalog)},
      {"test-plan", filter::to_json(plan)},
  };
  Session probe;
  for (std::size_t i = 0; i < opening.size(); ++i) apply(probe, i + 1, opening[i].first, opening[i].second);

  FileLock lock(root_ / kLockFile);
  std::uint64_t next = 1;
  for (const auto& id : list_sessions()) {
    std::smatch m;
    std::regex_match(id, m, session_pattern());
    next = std::max<std::uint64_t>(next, std::stoull(m[1].str()) + 1);
  }
  char number[32];
  std::snprintf(number, sizeof number, "s%04llu-", static_cast<unsigned long long>(next));
  const std::string id = number + random_suffix();
  const fs::path staging = root_ / (".tmp-" + id);
  fs::create_directories(staging);
  std::string previous = kGenesisDigest;
  const Timestamp at = clock_();
  for (std::size_t i = 0; i < opening.size(); ++i) {
    Json record = make_record(i + 1, opening[i].first, at, previous, std::move(opening[i].second));
    previous = record["digest"].get<std::string>();
    write_durably(staging / record_file_name(i + 1, opening[i].first), json_io::canonical(record));
  }
  fs::rename(staging, root_ / id);
  sync_path(root_, O_RDONLY | O_DIRECTORY);
  return id;
}

std::vector<std::string> CampaignStore::list_sessions() const {
  std::vector<std::pair<std::uint64_t, std::string>> found;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, session_pattern())) found.emplace_back(std::stoull(m[1].str()), name);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [n, id] : found) out.push_back(std::move(id));
  return out;
}

Session CampaignStore::load_session(const std::string& session_id) const {
  const fs::path dir = session_directory(session_id);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "no session '" + session_id + "'");

  std::vector<std::tuple<std::uint64_t, std::string, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, record_pattern())) files.emplace_back(std::stoull(m[1].str()), m[2].str(), entry.path());
  }
  std::sort(files.begin(), files.end());

  Session s;
  s.session_id = session_id;
  std::string previous = kGenesisDigest;
  auto corrupt = [&](const fs::path& file, const std::string& why) {
    throw Error(ErrorCode::CorruptLog, "session " + session_id + ": " + file.filename().string() + ": " + why);
  };
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& [sequence, kind, path] = files[i];
    if (sequence != i + 1) corrupt(path, "record " + std::to_string(i + 1) + " is missing");
    try {
      Json record = json_io::parse_text(read_file(path));
      ObjectReader r(record, "");
      r.expect_envelope(kRecordKind);
      if (static_cast<std::uint64_t>(r.integer("sequence")) != sequence) corrupt(path, "sequence mismatch");
      if (r.string("record-kind") != kind) corrupt(path, "record kind mismatch");
      Timestamp at = r.timestamp("appended-at");
      if (r.string("previous-digest") != previous) corrupt(path, "hash chain broken");
      const Json& document = r.required("document");
      std::string digest = r.string("digest");
      r.finish();
      Json unsigned_record = record;
      unsigned_record.erase("digest");
      if (record_digest(unsigned_record) != digest) corrupt(path, "digest mismatch");
      apply(s, sequence, kind, document);
      s.log.push_back({sequence, kind, at, digest});
      previous = digest;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CorruptLog) throw;
      corrupt(path, e.what());
    }
  }
  if (s.log.size() < 4) throw Error(ErrorCode::CorruptLog, "session " + session_id + " lacks its opening records");
  if (s.verdict) {
    auto recomputed = assessment::assess_plan(s.plan, s.protocols, s.verdict->scheme);
    if (recomputed != *s.verdict) {
      throw Error(ErrorCode::CorruptLog, "session " + session_id + ": stored verdict does not match its protocols");
    }
  }
  return s;
}

namespace {

// Appends one record under the session lock, after checking it replays.
Session append_record(const CampaignStore& store, const std::string& session_id, std::string_view kind,
                      Json document, const Clock& clock) {
  const fs::path dir = store.session_directory(session_id);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "no session '" + session_id + "'");
  FileLock lock(dir / kLockFile);
  Session s = store.load_session(session_id);
  const std::uint64_t sequence = s.log.size() + 1;
  apply(s, sequence, std::string(kind), document);
  const Timestamp at = clock();
  Json record = make_record(sequence, kind, at, s.log.back().digest, std::move(document));
  s.log.push_back({sequence, std::string(kind), at, record["digest"].get<std::string>()});
  write_durably(dir / record_file_name(sequence, kind), json_io::canonical(record));
  return s;
}

}  // namespace

SessionState CampaignStore::begin_execution(const std::string& session_id) {
  return append_record(*this, session_id, kExecutionStartedKind, json_io::envelope(kExecutionStartedKind), clock_).state;
}

SessionState CampaignStore::append_protocol(const std::string& session_id, const harness::ExecutionProtocol& protocol) {
  return append_record(*this, session_id, harness::kProtocolKind, harness::to_json(protocol), clock_).state;
}

assessment::OverallVerdict CampaignStore::assess(const std::string& session_id, const model::AssessmentScheme& scheme) {
  std::optional<assessment::OverallVerdict> verdict;
  const fs::path dir = session_directory(session_id);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NotFound, "no session '" + session_id + "'");
  {
    // Compute under the lock so the verdict matches the recorded protocols.
    FileLock lock(dir / kLockFile);
    Session s = load_session(session_id);
    Session check = s;
    assessment::OverallVerdict placeholder;
    placeholder.plan_id = s.plan.plan_id;
    apply_verdict(check, placeholder);  // raises WRONG_STATE early
    verdict = assessment::assess_plan(s.plan, s.protocols, scheme);
  }
  append_record(*this, session_id, assessment::kVerdictKind, assessment::to_json(*verdict), clock_);
  return *verdict;
}

}  // namespace iotsam::store
