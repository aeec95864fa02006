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


#include "generators.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string_view>

#include "iotsam/digest.hpp"
#include "iotsam/filter/filter.hpp"
#include "iotsam/model/tokens.hpp"

namespace iotsam::testing {

using namespace model;

namespace {

template <typename T, std::size_t N>
const T& pick(Rng& rng, const std::array<T, N>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(N) - 1))];
}

template <TokenEnum E>
E random_enum(Rng& rng) {
  auto values = all_values<E>();
  return values[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(values.size()) - 1))];
}

constexpr std::array<std::string_view, 4> kServices{"telnet", "http", "https", "mqtt"};
constexpr std::array<std::string_view, 3> kHosts{"192.0.2.10", "192.0.2.11", "device.local"};
constexpr std::array<std::int64_t, 4> kPorts{22, 23, 80, 443};
constexpr std::array<std::string_view, 5> kProtocols{"wifi", "ble", "zigbee", "thread", "lorawan"};
constexpr std::array<std::string_view, 3> kVersions{"1.0", "2.0", "23"};
constexpr std::array<std::string_view, 6> kAttributeNames{"host",    "port",    "service",
                                                          "protocol", "enabled", "version"};

AttributeValue random_value_for(Rng& rng, std::string_view name) {
  // Occasionally produce a value of the "wrong" type so EQ has to compare
  // typed values, e.g. port "23" against port 23.
  if (coin(rng, 0.1)) return std::string(pick(rng, kVersions));
  if (name == "host") return std::string(pick(rng, kHosts));
  if (name == "port") return pick(rng, kPorts);
  if (name == "service") return std::string(pick(rng, kServices));
  if (name == "protocol") return std::string(pick(rng, kProtocols));
  if (name == "enabled") return coin(rng);
  return std::string(pick(rng, kVersions));
}

std::string words(Rng& rng, std::string_view stem) {
  static constexpr std::array<std::string_view, 6> kWords{"check", "the", "device", "port",
                                                          "firmware", "öffnen"};
  std::string out(stem);
  int n = uniform(rng, 0, 4);
  for (int i = 0; i < n; ++i) {
    out += ' ';
    out += pick(rng, kWords);
  }
  return out;
}

std::string template_text(Rng& rng, std::string_view stem, const GenOptions& options) {
  std::string out = words(rng, stem);
  if (options.placeholders && coin(rng, 0.4)) {
    out += coin(rng) ? " {{attr:host}}" : " {{device:vendor}}";
  }
  return out;
}

int rank_of(std::string_view token) {
  // Local rank table over the level vocabularies.
  static const std::map<std::string_view, int> kRanks{
      {"REMOTE", 1},       {"ADJACENT", 2},         {"NONINVASIVE", 3},   {"INVASIVE", 4},
      {"UNAUTHORIZED", 1}, {"USER", 2},             {"ADMIN", 3},         {"MANUFACTURER", 4},
      {"NONPERSONAL", 1},  {"BEHAVIORAL", 2},       {"PERSONAL", 3},      {"CRITICAL", 4},
      {"INCONVENIENCE", 1}, {"PROPERTY_PRIVACY", 2}, {"SAFETY_LIMITED", 3}, {"SAFETY_CRITICAL", 4},
  };
  return kRanks.at(token);
}

template <TokenEnum E>
bool at_most(E required, E granted) {
  return rank_of(to_token(required)) <= rank_of(to_token(granted));
}

bool oracle_selector(const ComponentSelector& s, const DeviceComponent& c) {
  if (s.kind && *s.kind != c.kind) return false;
  for (const auto& k : s.constraints) {
    auto it = c.attributes.find(k.attribute);
    bool present = it != c.attributes.end();
    switch (k.op) {
      case SelectorOp::Present:
        if (!present) return false;
        break;
      case SelectorOp::Eq:
        if (!present || it->second != *k.value) return false;
        break;
      case SelectorOp::Neq:
        if (present && it->second == *k.value) return false;
        break;
    }
  }
  return true;
}

int severity_rank(Severity s) {
  return s == Severity::Critical ? 0 : s == Severity::Major ? 1 : 2;
}

}  // namespace

Timestamp fixed_time(std::int64_t offset_seconds) {
  // 2026-01-15T10:00:00Z
  return Timestamp{std::chrono::seconds{1768471200 + offset_seconds}};
}

Clock fixed_clock() {
  return [] { return fixed_time(); };
}

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

DeviceModel random_device(Rng& rng, const GenOptions& options) {
  DeviceModel d;
  d.device_id = "dev-" + std::to_string(uniform(rng, 0, 9999));
  d.display_name = words(rng, "Device");
  int n = uniform(rng, 1, static_cast<int>(options.max_components));
  for (int i = 0; i < n; ++i) {
    DeviceComponent c;
    c.id = "c" + std::to_string(i);
    c.kind = random_enum<ComponentKind>(rng);
    if (c.kind == ComponentKind::NetworkService) {
      c.attributes["host"] = std::string(pick(rng, kHosts));
      c.attributes["port"] = pick(rng, kPorts);
      c.attributes["service"] = std::string(pick(rng, kServices));
    } else if (c.kind == ComponentKind::WirelessInterface && coin(rng, 0.8)) {
      c.attributes["protocol"] = std::string(pick(rng, kProtocols));
    }
    int extra = uniform(rng, 0, 2);
    for (int k = 0; k < extra; ++k) {
      std::string_view name = pick(rng, kAttributeNames);
      if (c.attributes.contains(std::string(name))) continue;
      if (name == "protocol" || name == "host" || name == "port" || name == "service") continue;
      c.attributes[std::string(name)] = random_value_for(rng, name);
    }
    d.components.push_back(std::move(c));
  }
  if (coin(rng, 0.7)) d.metadata["vendor"] = words(rng, "Vendor");
  if (coin(rng)) d.metadata["firmware-version"] = std::string(pick(rng, kVersions));
  return d;
}

TestingProfile random_profile(Rng& rng) {
  TestingProfile p;
  p.profile_id = "profile-" + std::to_string(uniform(rng, 0, 999));
  p.granted_physical = random_enum<PhysicalAccess>(rng);
  p.granted_authorization = random_enum<AuthorizationAccess>(rng);
  p.data_sensitivity = random_enum<DataSensitivity>(rng);
  p.security_impact = random_enum<SecurityImpact>(rng);
  p.verification_level = random_enum<VerificationLevel>(rng);
  int eco = uniform(rng, 0, 3);
  for (int i = 0; i < eco; ++i) {
    p.ecosystem.push_back(EcosystemSystem{"sys-" + std::to_string(i), random_enum<EcosystemKind>(rng),
                                          words(rng, "endpoint"), coin(rng)});
  }
  int overrides = uniform(rng, 0, 3);
  for (int i = 0; i < overrides; ++i) {
    p.verification_overrides[random_enum<ComponentKind>(rng)] = random_enum<VerificationLevel>(rng);
  }
  return p;
}

TestCase random_case(Rng& rng, std::string case_id, const GenOptions& options) {
  TestCase c;
  c.case_id = std::move(case_id);
  c.title = words(rng, "Title");
  c.description = words(rng, "Description");
  c.required_physical = random_enum<PhysicalAccess>(rng);
  c.required_authorization = random_enum<AuthorizationAccess>(rng);
  c.min_data_sensitivity = random_enum<DataSensitivity>(rng);
  c.min_security_impact = random_enum<SecurityImpact>(rng);
  for (auto v : all_values<VerificationLevel>()) {
    if (coin(rng, 0.6)) c.verification_levels.insert(v);
  }
  if (c.verification_levels.empty()) c.verification_levels.insert(random_enum<VerificationLevel>(rng));
  if (coin(rng, 0.8)) c.selector.kind = random_enum<ComponentKind>(rng);
  int constraints = uniform(rng, 0, 2);
  for (int i = 0; i < constraints; ++i) {
    AttributeConstraint k;
    k.attribute = std::string(pick(rng, kAttributeNames));
    k.op = random_enum<SelectorOp>(rng);
    if (k.op != SelectorOp::Present) k.value = random_value_for(rng, k.attribute);
    c.selector.constraints.push_back(std::move(k));
  }
  c.severity = random_enum<Severity>(rng);
  c.mode = random_enum<ExecutionMode>(rng);
  if (c.mode != ExecutionMode::Manual) {
    ExecutorRef e;
    e.capability = "test.probe-" + std::to_string(uniform(rng, 0, 3));
    int params = uniform(rng, 0, 3);
    for (int i = 0; i < params; ++i) {
      e.parameters["p" + std::to_string(i)] = template_text(rng, "v", options);
    }
    c.executor = std::move(e);
  }
  if (c.mode != ExecutionMode::Automated) {
    int steps = uniform(rng, 1, 4);
    for (int i = 0; i < steps; ++i) {
      c.manual_steps.push_back(
          ManualStep{template_text(rng, "Step", options), template_text(rng, "", options)});
    }
  }
  int refs = uniform(rng, 0, 2);
  for (int i = 0; i < refs; ++i) c.references.push_back("REF-" + std::to_string(uniform(rng, 1, 99)));
  return c;
}

TestCaseCatalog random_catalog(Rng& rng, const GenOptions& options) {
  TestCaseCatalog cat;
  cat.catalog_id = "cat-" + std::to_string(uniform(rng, 0, 99));
  cat.version = std::to_string(uniform(rng, 1, 9)) + ".0";
  int n = uniform(rng, 0, static_cast<int>(options.max_cases));
  std::set<int> used;
  for (int i = 0; i < n; ++i) {
    int id = uniform(rng, 0, 9999);
    if (!used.insert(id).second) continue;
    // Ids are deliberately not generated in sorted order.
    cat.cases.push_back(random_case(rng, "TC-" + std::to_string(id), options));
  }
  return cat;
}

AssessmentScheme random_scheme(Rng& rng) {
  AssessmentScheme s;
  s.scheme_id = "scheme-" + std::to_string(uniform(rng, 0, 99));
  s.major_fail_threshold = static_cast<std::uint32_t>(uniform(rng, 0, 10));
  s.minor_fail_threshold = static_cast<std::uint32_t>(uniform(rng, 0, 10));
  s.inconclusive_policy = random_enum<InconclusivePolicy>(rng);
  return s;
}

filter::TestPlan random_plan(Rng& rng, std::size_t max_cases) {
  GenOptions options;
  options.max_cases = max_cases;
  options.max_components = 6;
  filter::TestPlan plan;
  for (int attempt = 0; attempt < 20; ++attempt) {
    DeviceModel device = random_device(rng, options);
    TestingProfile profile = random_profile(rng);
    profile.granted_physical = PhysicalAccess::Invasive;
    profile.granted_authorization = AuthorizationAccess::Manufacturer;
    TestCaseCatalog catalog = random_catalog(rng, options);
    plan = filter::filter_catalog(catalog, device, profile, fixed_clock());
    if (!plan.entries.empty()) break;
  }
  return plan;
}

harness::Observation random_observation(Rng& rng) {
  using namespace harness;
  Timestamp at = fixed_time(uniform(rng, 0, 100000)) + std::chrono::microseconds{uniform(rng, 0, 999999)};
  switch (uniform(rng, 0, 5)) {
    case 0:
      return Observation{TextPayload{words(rng, "note")}, at};
    case 1: {
      PortListPayload p;
      p.host = std::string(pick(rng, kHosts));
      p.first_port = static_cast<std::uint16_t>(uniform(rng, 1, 1000));
      p.last_port = static_cast<std::uint16_t>(uniform(rng, p.first_port, 2000));
      for (int port = p.first_port; port <= p.last_port; port += uniform(rng, 50, 400)) {
        p.open_ports.push_back(static_cast<std::uint16_t>(port));
      }
      return Observation{p, at};
    }
    case 2:
      return Observation{BannerPayload{std::string(pick(rng, kHosts)),
                                       static_cast<std::uint16_t>(pick(rng, kPorts)),
                                       words(rng, "SSH-2.0"), coin(rng)},
                         at};
    case 3: {
      TlsPosture t;
      t.host = std::string(pick(rng, kHosts));
      t.port = 443;
      for (auto v : model::all_values<TlsVersion>()) {
        if (coin(rng)) t.versions.push_back(v);
      }
      if (t.versions.empty()) t.versions.push_back(TlsVersion::Tls12);
      t.self_signed = coin(rng);
      if (coin(rng)) t.certificate_expiry = fixed_time(86400 * uniform(rng, -100, 400));
      return Observation{t, at};
    }
    case 4: {
      CredentialResultPayload c;
      c.host = std::string(pick(rng, kHosts));
      c.port = 23;
      c.service_kind = coin(rng) ? "telnet" : "http-basic";
      c.attempted = static_cast<std::uint32_t>(uniform(rng, 0, 20));
      int accepted = uniform(rng, 0, std::min<int>(2, static_cast<int>(c.attempted)));
      for (int i = 0; i < accepted; ++i) c.accepted.push_back(Credential{"admin", "pw" + std::to_string(i)});
      return Observation{c, at};
    }
    default:
      return evidence_observation(words(rng, "evidence bytes"), "evidence/" + std::to_string(uniform(rng, 0, 99)), at);
  }
}

harness::ExecutionProtocol random_protocol_for(Rng& rng, const filter::TestPlan& plan,
                                               const filter::PlannedTest& entry) {
  using namespace harness;
  ExecutionProtocol p;
  p.protocol_id = protocol_id_for(entry.entry_id);
  p.plan_id = plan.plan_id;
  p.plan_entry_id = entry.entry_id;
  p.case_id = entry.case_id;
  p.started_at = fixed_time(uniform(rng, 0, 1000));
  p.ended_at = p.started_at + std::chrono::microseconds{uniform(rng, 0, 5'000'000)};
  if (entry.mode == ExecutionMode::Automated) {
    p.executor = ExecutorIdentity{entry.executor->capability, "1.0.0", ""};
    int steps = uniform(rng, 1, 2);
    for (int i = 0; i < steps; ++i) {
      PerformedStep s{words(rng, "probe"), {}};
      int obs = uniform(rng, 0, 3);
      for (int k = 0; k < obs; ++k) s.observations.push_back(random_observation(rng));
      p.steps.push_back(std::move(s));
    }
    p.outcome = random_enum<Outcome>(rng);
  } else {
    p.executor = ExecutorIdentity{std::string(kManualIdentity), "", "assessor-" + std::to_string(uniform(rng, 1, 5))};
    for (const auto& g : entry.guide) {
      PerformedStep s{g.text, {}};
      int obs = uniform(rng, 0, 2);
      for (int k = 0; k < obs; ++k) s.observations.push_back(random_observation(rng));
      p.steps.push_back(std::move(s));
    }
    static constexpr std::array<Outcome, 4> kManual{Outcome::Pass, Outcome::Fail,
                                                    Outcome::Inconclusive, Outcome::Skipped};
    p.outcome = pick(rng, kManual);
  }
  p.rationale = words(rng, "because");
  return p;
}

std::vector<harness::ExecutionProtocol> random_protocols(Rng& rng, const filter::TestPlan& plan) {
  std::vector<harness::ExecutionProtocol> out;
  for (const auto& e : plan.entries) out.push_back(random_protocol_for(rng, plan, e));
  return out;
}

std::vector<OracleEntry> oracle_filter(const TestCaseCatalog& catalog, const DeviceModel& device,
                                       const TestingProfile& profile) {
  std::vector<OracleEntry> out;
  for (const auto& c : catalog.cases) {
    bool levels = at_most(c.required_physical, profile.granted_physical) &&
                  at_most(c.required_authorization, profile.granted_authorization) &&
                  at_most(c.min_data_sensitivity, profile.data_sensitivity) &&
                  at_most(c.min_security_impact, profile.security_impact);
    if (!levels) continue;
    for (const auto& comp : device.components) {
      if (!oracle_selector(c.selector, comp)) continue;
      auto it = profile.verification_overrides.find(comp.kind);
      VerificationLevel effective =
          it != profile.verification_overrides.end() ? it->second : profile.verification_level;
      if (!c.verification_levels.contains(effective)) continue;
      out.push_back(OracleEntry{c.case_id, comp.id, c.severity, c.mode});
    }
  }
  std::sort(out.begin(), out.end(), [](const OracleEntry& a, const OracleEntry& b) {
    if (a.severity != b.severity) return severity_rank(a.severity) < severity_rank(b.severity);
    if (a.case_id != b.case_id) return a.case_id < b.case_id;
    return a.component_id < b.component_id;
  });
  return out;
}

std::vector<OracleEntry> entries_of(const filter::TestPlan& plan) {
  std::vector<OracleEntry> out;
  for (const auto& e : plan.entries) {
    out.push_back(OracleEntry{e.case_id, e.target_component_id, e.severity, e.mode});
  }
  return out;
}

}  // namespace iotsam::testing
