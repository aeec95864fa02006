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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iotsam/model/json_io.hpp"
#include "iotsam/model/tokens.hpp"
#include "iotsam/timestamp.hpp"

namespace iotsam::harness {

enum class ObservationKind { Text, PortList, Banner, TlsPosture, CredentialResult, EvidenceDigest };

enum class TlsVersion { Tls10, Tls11, Tls12, Tls13 };

struct TextPayload {
  std::string text;
  bool operator==(const TextPayload&) const = default;
};

struct PortListPayload {
  std::string host;
  std::uint16_t first_port = 1;
  std::uint16_t last_port = 1;
  std::vector<std::uint16_t> open_ports;  // ascending
  bool operator==(const PortListPayload&) const = default;
};

/// Banner text has non-printable and non-ASCII bytes rendered as "\xHH".
struct BannerPayload {
  std::string host;
  std::uint16_t port = 0;
  std::string banner;
  bool unprompted = false;
  bool operator==(const BannerPayload&) const = default;
};

struct TlsPosture {
  std::string host;
  std::uint16_t port = 0;
  std::vector<TlsVersion> versions;  // ascending, non-empty
  bool self_signed = false;
  std::optional<Timestamp> certificate_expiry;
  bool operator==(const TlsPosture&) const = default;
};

struct Credential {
  std::string username;
  std::string password;
  bool operator==(const Credential&) const = default;
};

struct CredentialResultPayload {
  std::string host;
  std::uint16_t port = 0;
  std::string service_kind;
  std::uint32_t attempted = 0;
  std::vector<Credential> accepted;
  bool operator==(const CredentialResultPayload&) const = default;
};

/// Evidence bytes live outside the protocol; only their digest is recorded.
struct EvidenceDigestPayload {
  std::string algorithm = "sha256";
  std::string digest;   // lower-case hex
  std::string locator;  // where the evidence bytes are kept
  bool operator==(const EvidenceDigestPayload&) const = default;
};

using ObservationPayload = std::variant<TextPayload, PortListPayload, BannerPayload, TlsPosture,
                                        CredentialResultPayload, EvidenceDigestPayload>;

struct Observation {
  ObservationPayload payload;
  Timestamp captured_at{};

  ObservationKind kind() const { return static_cast<ObservationKind>(payload.index()); }
  bool operator==(const Observation&) const = default;
};

Observation text_observation(std::string text, Timestamp at = now());
Observation evidence_observation(std::string_view evidence_bytes, std::string locator,
                                 Timestamp at = now());

json_io::Json to_json(const Observation& observation);
Observation observation_from_json(const json_io::Json& node, const std::string& path);

}  // namespace iotsam::harness

namespace iotsam::model {

template <>
struct EnumTraits<harness::ObservationKind> {
  static constexpr std::array entries{
      std::pair{harness::ObservationKind::Text, std::string_view{"TEXT"}},
      std::pair{harness::ObservationKind::PortList, std::string_view{"PORT_LIST"}},
      std::pair{harness::ObservationKind::Banner, std::string_view{"BANNER"}},
      std::pair{harness::ObservationKind::TlsPosture, std::string_view{"TLS_POSTURE"}},
      std::pair{harness::ObservationKind::CredentialResult, std::string_view{"CREDENTIAL_RESULT"}},
      std::pair{harness::ObservationKind::EvidenceDigest, std::string_view{"EVIDENCE_DIGEST"}},
  };
};

template <>
struct EnumTraits<harness::TlsVersion> {
  static constexpr std::array entries{
      std::pair{harness::TlsVersion::Tls10, std::string_view{"tls1.0"}},
      std::pair{harness::TlsVersion::Tls11, std::string_view{"tls1.1"}},
      std::pair{harness::TlsVersion::Tls12, std::string_view{"tls1.2"}},
      std::pair{harness::TlsVersion::Tls13, std::string_view{"tls1.3"}},
  };
};

}  // namespace iotsam::model
