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

#include "iotsam/harness/observation.hpp"

#include <algorithm>

#include "iotsam/digest.hpp"

namespace iotsam::harness {

using json_io::Json;
using json_io::ObjectReader;
using json_io::join_path;

Observation text_observation(std::string text, Timestamp at) {
  return Observation{TextPayload{std::move(text)}, at};
}

Observation evidence_observation(std::string_view evidence_bytes, std::string locator,
                                 Timestamp at) {
  return Observation{EvidenceDigestPayload{"sha256", sha256_hex(evidence_bytes), std::move(locator)},
                     at};
}

namespace {

std::uint16_t port_from(ObjectReader& r, std::string_view key) {
  std::int64_t v = r.integer(key);
  if (v < 1 || v > 65535) throw Error(ErrorCode::Schema, "port out of range", r.path_of(key));
  return static_cast<std::uint16_t>(v);
}

struct PayloadWriter {
  Json operator()(const TextPayload& p) const {
    Json n = Json::object();
    n["text"] = p.text;
    return n;
  }
  Json operator()(const PortListPayload& p) const {
    Json n = Json::object();
    n["host"] = p.host;
    n["first-port"] = p.first_port;
    n["last-port"] = p.last_port;
    n["open-ports"] = p.open_ports;
    return n;
  }
  Json operator()(const BannerPayload& p) const {
    Json n = Json::object();
    n["host"] = p.host;
    n["port"] = p.port;
    n["banner"] = p.banner;
    n["unprompted"] = p.unprompted;
    return n;
  }
  Json operator()(const TlsPosture& p) const {
    Json n = Json::object();
    n["host"] = p.host;
    n["port"] = p.port;
    Json versions = Json::array();
    for (auto v : p.versions) versions.push_back(std::string(model::to_token(v)));
    n["versions"] = std::move(versions);
    n["self-signed"] = p.self_signed;
    n["certificate-expiry"] =
        p.certificate_expiry ? Json(format_timestamp(*p.certificate_expiry)) : Json(nullptr);
    return n;
  }
  Json operator()(const CredentialResultPayload& p) const {
    Json n = Json::object();
    n["host"] = p.host;
    n["port"] = p.port;
    n["service-kind"] = p.service_kind;
    n["attempted"] = p.attempted;
    Json accepted = Json::array();
    for (const auto& c : p.accepted) {
      Json cn = Json::object();
      cn["username"] = c.username;
      cn["password"] = c.password;
      accepted.push_back(std::move(cn));
    }
    n["accepted"] = std::move(accepted);
    return n;
  }
  Json operator()(const EvidenceDigestPayload& p) const {
    Json n = Json::object();
    n["algorithm"] = p.algorithm;
    n["digest"] = p.digest;
    n["locator"] = p.locator;
    return n;
  }
};

ObservationPayload payload_from_json(ObservationKind kind, const Json& node,
                                     const std::string& path) {
  ObjectReader r(node, path);
  ObservationPayload out;
  switch (kind) {
    case ObservationKind::Text: out = TextPayload{r.string("text")}; break;
    case ObservationKind::PortList: {
      PortListPayload p;
      p.host = r.nonempty("host");
      p.first_port = port_from(r, "first-port");
      p.last_port = port_from(r, "last-port");
      if (p.first_port > p.last_port) {
        throw Error(ErrorCode::Invariant, "empty port range", r.path_of("last-port"));
      }
      const Json& ports = r.array("open-ports");
      for (std::size_t i = 0; i < ports.size(); ++i) {
        std::int64_t v = json_io::as_integer(ports[i], join_path(r.path_of("open-ports"), i));
        if (v < p.first_port || v > p.last_port ||
            (!p.open_ports.empty() && v <= p.open_ports.back())) {
          throw Error(ErrorCode::Invariant, "open ports must be ascending and in range",
                      join_path(r.path_of("open-ports"), i));
        }
        p.open_ports.push_back(static_cast<std::uint16_t>(v));
      }
      out = std::move(p);
      break;
    }
    case ObservationKind::Banner: {
      BannerPayload p;
      p.host = r.nonempty("host");
      p.port = port_from(r, "port");
      p.banner = r.string("banner");
      p.unprompted = r.boolean("unprompted");
      out = std::move(p);
      break;
    }
    case ObservationKind::TlsPosture: {
      TlsPosture p;
      p.host = r.nonempty("host");
      p.port = port_from(r, "port");
      const Json& versions = r.array("versions");
      for (std::size_t i = 0; i < versions.size(); ++i) {
        auto v = json_io::as_enum<TlsVersion>(versions[i], join_path(r.path_of("versions"), i));
        if (!p.versions.empty() && v <= p.versions.back()) {
          throw Error(ErrorCode::Invariant, "versions must be ascending and unique",
                      join_path(r.path_of("versions"), i));
        }
        p.versions.push_back(v);
      }
      if (p.versions.empty()) {
        throw Error(ErrorCode::Invariant, "versions must not be empty", r.path_of("versions"));
      }
      p.self_signed = r.boolean("self-signed");
      const Json& expiry = r.required("certificate-expiry");
      if (!expiry.is_null()) {
        p.certificate_expiry = json_io::as_timestamp(expiry, r.path_of("certificate-expiry"));
      }
      out = std::move(p);
      break;
    }
    case ObservationKind::CredentialResult: {
      CredentialResultPayload p;
      p.host = r.nonempty("host");
      p.port = port_from(r, "port");
      p.service_kind = r.nonempty("service-kind");
      std::int64_t attempted = r.integer("attempted");
      if (attempted < 0 || attempted > UINT32_MAX) {
        throw Error(ErrorCode::Schema, "attempted out of range", r.path_of("attempted"));
      }
      p.attempted = static_cast<std::uint32_t>(attempted);
      const Json& accepted = r.array("accepted");
      for (std::size_t i = 0; i < accepted.size(); ++i) {
        ObjectReader cr(accepted[i], join_path(r.path_of("accepted"), i));
        Credential c{cr.string("username"), cr.string("password")};
        cr.finish();
        p.accepted.push_back(std::move(c));
      }
      if (p.accepted.size() > p.attempted) {
        throw Error(ErrorCode::Invariant, "more accepted than attempted", r.path_of("accepted"));
      }
      out = std::move(p);
      break;
    }
    case ObservationKind::EvidenceDigest: {
      EvidenceDigestPayload p;
      p.algorithm = r.string("algorithm");
      if (p.algorithm != "sha256") {
        throw Error(ErrorCode::Schema, "unsupported digest algorithm", r.path_of("algorithm"));
      }
      p.digest = r.string("digest");
      if (!is_sha256_hex(p.digest)) {
        throw Error(ErrorCode::Schema, "digest must be 64 lower-case hex characters",
                    r.path_of("digest"));
      }
      p.locator = r.string("locator");
      out = std::move(p);
      break;
    }
  }
  r.finish();
  return out;
}

}  // namespace

Json to_json(const Observation& observation) {
  Json n = Json::object();
  n["kind"] = std::string(model::to_token(observation.kind()));
  n["captured-at"] = format_timestamp(observation.captured_at);
  n["payload"] = std::visit(PayloadWriter{}, observation.payload);
  return n;
}

Observation observation_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  auto kind = r.enumeration<ObservationKind>("kind");
  Observation out;
  out.captured_at = r.timestamp("captured-at");
  out.payload = payload_from_json(kind, r.required("payload"), r.path_of("payload"));
  r.finish();
  return out;
}

}  // namespace iotsam::harness
