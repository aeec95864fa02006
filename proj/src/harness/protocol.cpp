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

#include "iotsam/harness/protocol.hpp"

namespace iotsam::harness {

using json_io::Json;
using json_io::ObjectReader;
using json_io::join_path;

std::vector<Observation> ExecutionProtocol::all_observations() const {
  std::vector<Observation> out;
  for (const auto& s : steps) out.insert(out.end(), s.observations.begin(), s.observations.end());
  return out;
}

std::string protocol_id_for(std::string_view plan_entry_id) {
  return "PR-" + std::string(plan_entry_id);
}

Json to_json(const ExecutionProtocol& p) {
  Json doc = json_io::envelope(kProtocolKind);
  doc["protocol-id"] = p.protocol_id;
  doc["plan-id"] = p.plan_id;
  doc["plan-entry-id"] = p.plan_entry_id;
  doc["case-id"] = p.case_id;
  Json executor = Json::object();
  executor["identity"] = p.executor.identity;
  if (p.executor.is_manual()) {
    executor["assessor-id"] = p.executor.assessor_id;
  } else {
    executor["version"] = p.executor.version;
  }
  doc["executor"] = std::move(executor);
  doc["started-at"] = format_timestamp(p.started_at);
  doc["ended-at"] = format_timestamp(p.ended_at);
  Json steps = Json::array();
  for (const auto& s : p.steps) {
    Json sn = Json::object();
    sn["step"] = s.text;
    Json obs = Json::array();
    for (const auto& o : s.observations) obs.push_back(to_json(o));
    sn["observations"] = std::move(obs);
    steps.push_back(std::move(sn));
  }
  doc["steps-performed"] = std::move(steps);
  doc["outcome"] = std::string(model::to_token(p.outcome));
  doc["outcome-rationale"] = p.rationale;
  return doc;
}

ExecutionProtocol protocol_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(kProtocolKind);
  ExecutionProtocol p;
  p.protocol_id = r.nonempty("protocol-id");
  p.plan_id = r.nonempty("plan-id");
  p.plan_entry_id = r.nonempty("plan-entry-id");
  p.case_id = r.nonempty("case-id");
  {
    ObjectReader er(r.required("executor"), r.path_of("executor"));
    p.executor.identity = er.nonempty("identity");
    if (p.executor.is_manual()) {
      p.executor.assessor_id = er.nonempty("assessor-id");
    } else {
      p.executor.version = er.nonempty("version");
    }
    er.finish();
  }
  p.started_at = r.timestamp("started-at");
  p.ended_at = r.timestamp("ended-at");
  if (p.ended_at < p.started_at) {
    throw Error(ErrorCode::Invariant, "ended-at precedes started-at", r.path_of("ended-at"));
  }
  const Json& steps = r.array("steps-performed");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string spath = join_path(r.path_of("steps-performed"), i);
    ObjectReader sr(steps[i], spath);
    PerformedStep s;
    s.text = sr.string("step");
    const Json& obs = sr.array("observations");
    for (std::size_t j = 0; j < obs.size(); ++j) {
      s.observations.push_back(observation_from_json(obs[j], join_path(sr.path_of("observations"), j)));
    }
    sr.finish();
    p.steps.push_back(std::move(s));
  }
  p.outcome = r.enumeration<Outcome>("outcome");
  p.rationale = r.string("outcome-rationale");
  r.finish();
  if (p.executor.is_manual() && p.outcome == Outcome::Error) {
    throw Error(ErrorCode::Invariant, "ERROR is reserved for automated executors",
                r.path_of("outcome"));
  }
  return p;
}

std::string serialize_protocol(const ExecutionProtocol& protocol) {
  return json_io::canonical(to_json(protocol));
}

ExecutionProtocol parse_protocol(std::string_view bytes) {
  return protocol_from_json(json_io::parse_text(bytes));
}

}  // namespace iotsam::harness
