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

#include <arpa/inet.h>

#include <algorithm>
#include <set>

#include "iotsam/mock/mock_device.hpp"

namespace iotsam::mock {

using json_io::Json;
using json_io::ObjectReader;

namespace {

std::vector<harness::Credential> read_credentials(ObjectReader& reader) {
  std::vector<harness::Credential> out;
  const Json* node = reader.optional("credentials");
  if (node == nullptr) return out;
  const std::string path = reader.path_of("credentials");
  const Json& list = json_io::as_array(*node, path);
  for (std::size_t i = 0; i < list.size(); ++i) {
    ObjectReader cr(list[i], json_io::join_path(path, i));
    out.push_back({cr.nonempty("username"), cr.string("password")});
    cr.finish();
  }
  return out;
}

MockService read_service(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  MockService s;
  std::int64_t port = r.integer("port");
  if (port < 1 || port > 65535) throw Error(ErrorCode::Schema, "port must be 1-65535", r.path_of("port"));
  s.port = static_cast<std::uint16_t>(port);
  s.protocol = r.enumeration<ServiceProtocol>("protocol");
  switch (s.protocol) {
    case ServiceProtocol::Telnet:
      if (const Json* b = r.optional("banner")) s.banner = json_io::as_string(*b, r.path_of("banner"));
      s.credentials = read_credentials(r);
      break;
    case ServiceProtocol::Http:
      s.credentials = read_credentials(r);
      break;
    case ServiceProtocol::Tls: {
      const std::string vpath = r.path_of("tls-versions");
      const Json& versions = r.array("tls-versions");
      for (std::size_t i = 0; i < versions.size(); ++i) {
        s.tls_versions.push_back(json_io::as_enum<harness::TlsVersion>(versions[i], json_io::join_path(vpath, i)));
      }
      std::sort(s.tls_versions.begin(), s.tls_versions.end());
      if (s.tls_versions.empty()) throw Error(ErrorCode::Invariant, "tls service needs at least one version", vpath);
      if (std::adjacent_find(s.tls_versions.begin(), s.tls_versions.end()) != s.tls_versions.end()) {
        throw Error(ErrorCode::Invariant, "duplicate tls version", vpath);
      }
      auto span = static_cast<std::size_t>(s.tls_versions.back()) - static_cast<std::size_t>(s.tls_versions.front());
      if (span + 1 != s.tls_versions.size()) {
        throw Error(ErrorCode::Invariant, "tls versions must form a contiguous range", vpath);
      }
      if (r.optional("certificate") != nullptr) s.certificate = r.enumeration<CertificateKind>("certificate");
      break;
    }
    case ServiceProtocol::Silent:
      break;
  }
  r.finish();
  return s;
}

}  // namespace

MockDeviceConfig parse_mock_config(std::string_view bytes) {
  Json doc = json_io::parse_text(bytes);
  ObjectReader r(doc, "");
  r.expect_envelope(kMockDeviceKind);
  MockDeviceConfig config;
  config.address = r.nonempty("address");
  in_addr probe{};
  if (::inet_pton(AF_INET, config.address.c_str(), &probe) != 1) {
    throw Error(ErrorCode::Schema, "address must be an IPv4 literal", "/address");
  }
  const Json& services = r.array("services");
  std::set<std::uint16_t> ports;
  for (std::size_t i = 0; i < services.size(); ++i) {
    const std::string path = json_io::join_path("/services", i);
    MockService s = read_service(services[i], path);
    if (!ports.insert(s.port).second) {
      throw Error(ErrorCode::Invariant, "port " + std::to_string(s.port) + " configured twice", path);
    }
    config.services.push_back(std::move(s));
  }
  r.finish();
  return config;
}

std::string serialize_mock_config(const MockDeviceConfig& config) {
  Json doc = json_io::envelope(kMockDeviceKind);
  doc["address"] = config.address;
  Json services = Json::array();
  for (const auto& s : config.services) {
    Json node;
    node["port"] = s.port;
    node["protocol"] = model::to_token(s.protocol);
    if (s.protocol == ServiceProtocol::Telnet) node["banner"] = s.banner;
    if (s.protocol == ServiceProtocol::Telnet || s.protocol == ServiceProtocol::Http) {
      Json creds = Json::array();
      for (const auto& c : s.credentials) creds.push_back({{"username", c.username}, {"password", c.password}});
      node["credentials"] = std::move(creds);
    }
    if (s.protocol == ServiceProtocol::Tls) {
      Json versions = Json::array();
      for (auto v : s.tls_versions) versions.push_back(model::to_token(v));
      node["tls-versions"] = std::move(versions);
      node["certificate"] = model::to_token(s.certificate);
    }
    services.push_back(std::move(node));
  }
  doc["services"] = std::move(services);
  return json_io::canonical(doc);
}

}  // namespace iotsam::mock
