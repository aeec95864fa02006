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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "iotsam/harness/observation.hpp"
#include "iotsam/model/json_io.hpp"

namespace iotsam::mock {

enum class ServiceProtocol { Telnet, Http, Tls, Silent };

enum class CertificateKind { SelfSigned, CaSigned };

struct MockService {
  std::uint16_t port = 0;
  ServiceProtocol protocol = ServiceProtocol::Silent;
  /// telnet: sent on connect, followed by a line break. The login prompt
  /// follows the first keystroke.
  std::string banner;
  /// telnet logins, or http Basic accounts. Empty for http means no
  /// challenge at all.
  std::vector<harness::Credential> credentials;
  /// tls only.
  std::vector<harness::TlsVersion> tls_versions;
  CertificateKind certificate = CertificateKind::SelfSigned;
};

struct MockDeviceConfig {
  std::string address = "127.0.0.1";
  std::vector<MockService> services;
};

inline constexpr std::string_view kMockDeviceKind = "mock-device";

/// SCHEMA / INVARIANT on malformed configs (duplicate ports, tls without
/// versions, ...).
MockDeviceConfig parse_mock_config(std::string_view bytes);
std::string serialize_mock_config(const MockDeviceConfig& config);

/// A loopback fixture serving the configured services until destroyed.
/// Binding ports below 1024 needs the usual privileges.
class MockDevice {
 public:
  /// Binds every service; throws IO if any port cannot be bound.
  explicit MockDevice(MockDeviceConfig config);
  ~MockDevice();
  MockDevice(const MockDevice&) = delete;
  MockDevice& operator=(const MockDevice&) = delete;

  const MockDeviceConfig& config() const;
  /// Connections accepted so far across all services.
  std::size_t connections() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iotsam::mock

namespace iotsam::model {

template <>
struct EnumTraits<mock::ServiceProtocol> {
  static constexpr std::array entries{
      std::pair{mock::ServiceProtocol::Telnet, std::string_view{"telnet"}},
      std::pair{mock::ServiceProtocol::Http, std::string_view{"http"}},
      std::pair{mock::ServiceProtocol::Tls, std::string_view{"tls"}},
      std::pair{mock::ServiceProtocol::Silent, std::string_view{"silent"}},
  };
};

template <>
struct EnumTraits<mock::CertificateKind> {
  static constexpr std::array entries{
      std::pair{mock::CertificateKind::SelfSigned, std::string_view{"self-signed"}},
      std::pair{mock::CertificateKind::CaSigned, std::string_view{"ca-signed"}},
  };
};

}  // namespace iotsam::model
