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

#include "iotsam/error.hpp"
#include "iotsam/probes/probes.hpp"

namespace iotsam::probes {

namespace {

using harness::ExecutionContext;
using harness::ExecutorDescriptor;
using harness::ObservationKind;
using harness::ParameterType;
using harness::PerformedStep;

constexpr const char* kVersion = "1.0.0";

Millis millis(const harness::Parameters& p, const std::string& name, std::int64_t fallback) {
  return Millis{p.integer(name, fallback)};
}

ProbeTarget target_of(const harness::Parameters& p) {
  std::int64_t port = p.integer("port");
  if (port < 1 || port > 65535) {
    throw Error(ErrorCode::Precondition, "port " + std::to_string(port) + " out of range");
  }
  return {p.text("host"), static_cast<std::uint16_t>(port), millis(p, "connect-timeout-ms", 1000)};
}

std::vector<PerformedStep> single(std::string text, harness::ObservationPayload payload) {
  PerformedStep step;
  step.text = std::move(text);
  step.observations.push_back({std::move(payload), now()});
  return {std::move(step)};
}

std::vector<PerformedStep> run_port_scan(const ExecutionContext& ctx) {
  const auto& p = ctx.parameters;
  auto range = p.port_range("ports");
  ScanOptions options;
  options.parallelism = static_cast<std::size_t>(std::max<std::int64_t>(1, p.integer("parallelism", 64)));
  options.connect_timeout = millis(p, "connect-timeout-ms", 500);
  auto result = tcp_port_scan(p.text("host"), range.first, range.last, options, ctx.stop);
  return single("TCP connect scan of " + p.text("host") + " ports " + std::to_string(range.first) +
                    "-" + std::to_string(range.last),
                std::move(result));
}

std::vector<PerformedStep> run_banner_grab(const ExecutionContext& ctx) {
  auto target = target_of(ctx.parameters);
  auto banner = service_banner_grab(target, millis(ctx.parameters, "read-timeout-ms", 1500));
  return single("read service banner from " + target.host + ":" + std::to_string(target.port),
                std::move(banner));
}

std::vector<PerformedStep> run_tls_posture(const ExecutionContext& ctx) {
  auto target = target_of(ctx.parameters);
  return single("TLS handshake per protocol version against " + target.host + ":" +
                    std::to_string(target.port),
                tls_posture_check(target));
}

std::vector<PerformedStep> run_default_credentials(const ExecutionContext& ctx) {
  const auto& p = ctx.parameters;
  auto target = target_of(p);
  auto service = credential_service_from_token(p.text("service-kind"));
  std::string list_name = p.has("credential-list") ? p.text("credential-list") : "default";
  auto credentials = load_credential_list(resolve_credential_list(list_name));
  CredentialOptions options;
  options.read_timeout = millis(p, "read-timeout-ms", 1500);
  if (p.has("path")) options.http_path = p.text("path");
  auto result = default_credential_check(target, service, credentials, options, ctx.stop);
  return single("tried " + std::to_string(credentials.size()) + " default " +
                    std::string(credential_service_token(service)) + " credentials on " +
                    target.host + ":" + std::to_string(target.port),
                std::move(result));
}

harness::ParameterSpec required(std::string name, ParameterType type) { return {std::move(name), type, true}; }
harness::ParameterSpec optional(std::string name, ParameterType type) { return {std::move(name), type, false}; }

}  // namespace

void register_network_probes(harness::ExecutorRegistry& registry) {
  registry.register_executor(
      ExecutorDescriptor{std::string(kPortScan), kVersion,
                         {required("host", ParameterType::String),
                          required("ports", ParameterType::PortRange),
                          optional("parallelism", ParameterType::Integer),
                          optional("connect-timeout-ms", ParameterType::Integer)},
                         {ObservationKind::PortList}},
      run_port_scan, verdict_map);
  registry.register_executor(
      ExecutorDescriptor{std::string(kBannerGrab), kVersion,
                         {required("host", ParameterType::String),
                          required("port", ParameterType::Integer),
                          optional("connect-timeout-ms", ParameterType::Integer),
                          optional("read-timeout-ms", ParameterType::Integer)},
                         {ObservationKind::Banner}},
      run_banner_grab, verdict_map);
  registry.register_executor(
      ExecutorDescriptor{std::string(kTlsPosture), kVersion,
                         {required("host", ParameterType::String),
                          required("port", ParameterType::Integer),
                          optional("connect-timeout-ms", ParameterType::Integer)},
                         {ObservationKind::TlsPosture}},
      run_tls_posture, verdict_map);
  registry.register_executor(
      ExecutorDescriptor{std::string(kDefaultCredentials), kVersion,
                         {required("host", ParameterType::String),
                          required("port", ParameterType::Integer),
                          required("service-kind", ParameterType::String),
                          optional("credential-list", ParameterType::String),
                          optional("path", ParameterType::String),
                          optional("connect-timeout-ms", ParameterType::Integer),
                          optional("read-timeout-ms", ParameterType::Integer)},
                         {ObservationKind::CredentialResult}},
      run_default_credentials, verdict_map);
}

}  // namespace iotsam::probes
