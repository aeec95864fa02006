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

#include <algorithm>
#include <array>
#include <regex>

#include "iotsam/error.hpp"
#include "iotsam/probes/probes.hpp"

namespace iotsam::probes {

namespace {

using harness::Observation;
using harness::Outcome;
using harness::Verdict;
using Observations = std::span<const Observation>;

template <typename Payload>
std::vector<const Payload*> payloads(Observations observations) {
  std::vector<const Payload*> out;
  for (const auto& o : observations) {
    if (auto* p = std::get_if<Payload>(&o.payload)) out.push_back(p);
  }
  return out;
}

Verdict missing(std::string_view what) {
  return {Outcome::Inconclusive, "no " + std::string(what) + " observation to judge"};
}

bool legacy(const harness::TlsPosture& p) {
  return std::any_of(p.versions.begin(), p.versions.end(), [](harness::TlsVersion v) {
    return v == harness::TlsVersion::Tls10 || v == harness::TlsVersion::Tls11;
  });
}

std::string endpoint(const std::string& host, std::uint16_t port) {
  return host + ":" + std::to_string(port);
}

Verdict telnet_exposed(Observations obs) {
  auto scans = payloads<harness::PortListPayload>(obs);
  if (scans.empty()) return missing("PORT_LIST");
  for (auto* s : scans) {
    if (std::find(s->open_ports.begin(), s->open_ports.end(), 23) != s->open_ports.end()) {
      return {Outcome::Fail, "port 23 (telnet) is open on " + s->host};
    }
  }
  return {Outcome::Pass, "port 23 (telnet) is closed"};
}

Verdict banner_disclosure(Observations obs) {
  static const std::regex version(R"(\d+\.\d+)");
  auto banners = payloads<harness::BannerPayload>(obs);
  if (banners.empty()) return missing("BANNER");
  for (auto* b : banners) {
    if (std::regex_search(b->banner, version)) {
      return {Outcome::Fail, "banner on " + endpoint(b->host, b->port) + " discloses a version"};
    }
  }
  return {Outcome::Pass, "no version string in the service banner"};
}

Verdict legacy_tls(Observations obs) {
  auto postures = payloads<harness::TlsPosture>(obs);
  if (postures.empty()) return missing("TLS_POSTURE");
  for (auto* p : postures) {
    if (legacy(*p)) {
      return {Outcome::Fail, endpoint(p->host, p->port) + " accepts tls1.0 or tls1.1"};
    }
  }
  return {Outcome::Pass, "only tls1.2 or later accepted"};
}

Verdict default_credentials(Observations obs) {
  auto results = payloads<harness::CredentialResultPayload>(obs);
  if (results.empty()) return missing("CREDENTIAL_RESULT");
  for (auto* r : results) {
    if (!r->accepted.empty()) {
      const auto& c = r->accepted.front();
      return {Outcome::Fail, std::to_string(r->accepted.size()) + " default credential pair(s) accepted on " +
                                 endpoint(r->host, r->port) + ", e.g. " + c.username + "/" + c.password};
    }
  }
  return {Outcome::Pass, "no default credential accepted"};
}

Verdict certificate_trust(Observations obs) {
  auto postures = payloads<harness::TlsPosture>(obs);
  if (postures.empty()) return missing("TLS_POSTURE");
  for (auto* p : postures) {
    if (p->self_signed) return {Outcome::Fail, endpoint(p->host, p->port) + " presents a self-signed certificate"};
  }
  return {Outcome::Pass, "certificate is issued by a separate authority"};
}

Verdict update_channel(Observations obs) {
  auto postures = payloads<harness::TlsPosture>(obs);
  if (postures.empty()) return missing("TLS_POSTURE");
  for (auto* p : postures) {
    if (legacy(*p)) return {Outcome::Fail, "update endpoint accepts tls1.0 or tls1.1"};
    if (p->self_signed) return {Outcome::Fail, "update endpoint certificate is self-signed"};
  }
  return {Outcome::Pass, "update endpoint uses modern TLS with an issued certificate"};
}

using Rule = Verdict (*)(Observations);

constexpr std::array<std::pair<std::string_view, Rule>, 7> kRules{{
    {"TC-NET-001", telnet_exposed},
    {"TC-NET-002", banner_disclosure},
    {"TC-NET-003", legacy_tls},
    {"TC-NET-004", default_credentials},
    {"TC-NET-005", default_credentials},
    {"TC-NET-006", certificate_trust},
    {"TC-UPD-001", update_channel},
}};

constexpr std::array<std::string_view, kRules.size()> kIds = [] {
  std::array<std::string_view, kRules.size()> ids{};
  for (std::size_t i = 0; i < kRules.size(); ++i) ids[i] = kRules[i].first;
  return ids;
}();

}  // namespace

Verdict verdict_map(std::string_view case_id, std::span<const Observation> observations) {
  for (const auto& [id, rule] : kRules) {
    if (id == case_id) return rule(observations);
  }
  throw Error(ErrorCode::UnknownCase, "no network verdict rule for case '" + std::string(case_id) + "'");
}

std::span<const std::string_view> mapped_case_ids() { return kIds; }

}  // namespace iotsam::probes
