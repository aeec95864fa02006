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
#include <cstdint>
#include <filesystem>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "iotsam/harness/observation.hpp"
#include "iotsam/harness/registry.hpp"

namespace iotsam::probes {

using Millis = std::chrono::milliseconds;

struct ProbeTarget {
  std::string host;
  std::uint16_t port = 0;
  Millis connect_timeout{1000};

  /// PRECONDITION on an empty host, port 0 or a non-positive timeout.
  void validate() const;
};

struct ScanOptions {
  std::size_t parallelism = 64;
  Millis connect_timeout{500};
};

/// Open TCP ports in [first, last], ascending. PRECONDITION if the range is
/// empty or outside 1-65535; HOST_UNREACHABLE if nothing answered and the
/// host looks unreachable.
harness::PortListPayload tcp_port_scan(const std::string& host, int first, int last,
                                       const ScanOptions& options = {},
                                       std::stop_token stop = {});

inline constexpr std::size_t kMaxBannerBytes = 1024;

/// Reads what the service volunteers, minus a trailing line break. A silent
/// service yields an empty banner. CONNECTION_REFUSED / HOST_UNREACHABLE on connect failure.
harness::BannerPayload service_banner_grab(const ProbeTarget& target, Millis read_timeout = Millis{1500});

/// Printable rendering of raw banner bytes; control bytes other than tab,
/// CR and LF become \xHH.
std::string sanitize_banner(std::string_view raw);

/// One handshake per protocol version. NOT_TLS if none succeeds.
harness::TlsPosture tls_posture_check(const ProbeTarget& target);

enum class CredentialService { Telnet, HttpBasic };

/// "telnet" or "http-basic"; PRECONDITION otherwise.
CredentialService credential_service_from_token(std::string_view token);
std::string_view credential_service_token(CredentialService service);

struct CredentialOptions {
  Millis read_timeout{1500};
  /// Minimum spacing between attempt starts (2 per second).
  Millis min_attempt_interval{500};
  std::string http_path = "/";
};

/// Tries each pair in order and reports the accepted ones. PRECONDITION on
/// an empty list; SERVICE_MISMATCH when the endpoint does not speak the
/// protocol.
harness::CredentialResultPayload default_credential_check(
    const ProbeTarget& target, CredentialService service,
    std::span<const harness::Credential> credentials, const CredentialOptions& options = {},
    std::stop_token stop = {});

/// "user:password" per line; blank lines and '#' comments skipped. The
/// password is everything after the first colon.
std::vector<harness::Credential> parse_credential_list(std::string_view text);
std::vector<harness::Credential> load_credential_list(const std::filesystem::path& file);

/// Bundled data directory: $IOTSAM_DATA_DIR, else the build-time default.
std::filesystem::path data_directory();
/// "default" names the bundled list; anything else is a file path.
std::filesystem::path resolve_credential_list(std::string_view name);

/// Pure per-case mapping for the bundled network cases. UNKNOWN_CASE for any
/// other case id.
harness::Verdict verdict_map(std::string_view case_id,
                             std::span<const harness::Observation> observations);
/// Case ids verdict_map understands.
std::span<const std::string_view> mapped_case_ids();

inline constexpr std::string_view kPortScan = "net.port-scan";
inline constexpr std::string_view kBannerGrab = "net.banner-grab";
inline constexpr std::string_view kTlsPosture = "net.tls-posture";
inline constexpr std::string_view kDefaultCredentials = "net.default-credentials";

/// Registers the four network executors, all sharing verdict_map.
void register_network_probes(harness::ExecutorRegistry& registry);

}  // namespace iotsam::probes
