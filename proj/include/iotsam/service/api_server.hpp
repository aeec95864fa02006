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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iotsam/harness/harness.hpp"
#include "iotsam/harness/registry.hpp"
#include "iotsam/model/types.hpp"

namespace iotsam::service {

inline constexpr std::string_view kApiPrefix = "/api/v1";
inline constexpr std::string_view kDefaultListen = "127.0.0.1:8660";

struct ServiceOptions {
  std::filesystem::path store_root;
  std::string host = "127.0.0.1";
  int port = 8660;  // 0 picks a free port
  /// Schemes selectable by `assess?scheme-id=`.
  std::vector<model::AssessmentScheme> schemes;
  std::size_t parallelism = 4;
  harness::HarnessOptions harness;
  /// Served at "/" when set (console build output).
  std::optional<std::filesystem::path> static_dir;
};

/// "host:port"; PRECONDITION on anything else.
std::pair<std::string, int> parse_listen(std::string_view text);

/// A manual-results request body.
struct ManualSubmission {
  std::string plan_entry_id;
  std::string assessor_id;
  std::vector<std::vector<harness::Observation>> step_observations;
  harness::Outcome outcome = harness::Outcome::Pass;
  std::string rationale;
};

/// Observations may be full observation objects or plain strings (TEXT).
ManualSubmission manual_submission_from_json(const json_io::Json& node, const Clock& clock = system_clock());

/// HTTP status for an error code: 400 validation, 404 NOT_FOUND,
/// 409 WRONG_STATE / DUPLICATE_ENTRY, 500 otherwise.
int http_status_for(ErrorCode code);

class ApiServer {
 public:
  ApiServer(ServiceOptions options, harness::ExecutorRegistry registry);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the listening socket and returns the bound port. IO on failure.
  int bind();
  /// Serves until stop(); binds first if needed.
  void listen();
  /// bind() plus listen() on a background thread.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iotsam::service
