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

#include "iotsam/filter/plan.hpp"

#include <set>
#include <tuple>

#include "iotsam/model/placeholders.hpp"

namespace iotsam::filter {

using json_io::Json;
using json_io::ObjectReader;
using json_io::join_path;

const PlannedTest* TestPlan::find(std::string_view entry_id) const {
  for (const auto& e : entries) {
    if (e.entry_id == entry_id) return &e;
  }
  return nullptr;
}

std::string entry_id_for(std::string_view case_id, std::string_view component_id) {
  std::string out(case_id);
  out += '@';
  out += component_id;
  return out;
}

bool entry_order_less(const PlannedTest& a, const PlannedTest& b) {
  return std::tie(a.severity, a.case_id, a.target_component_id) <
         std::tie(b.severity, b.case_id, b.target_component_id);
}

namespace {

void require_resolved(const std::string& text, const std::string& path) {
  bool clean = true;
  try {
    clean = model::scan_placeholders(text).empty();
  } catch (const Error&) {
    clean = false;
  }
  if (!clean) throw Error(ErrorCode::Invariant, "unresolved placeholder", path);
}

}  // namespace

Json planned_test_to_json(const PlannedTest& e) {
  Json node = Json::object();
  node["plan-entry-id"] = e.entry_id;
  node["case-id"] = e.case_id;
  node["title"] = e.title;
  node["target-component-id"] = e.target_component_id;
  node["severity"] = std::string(model::to_token(e.severity));
  node["execution-mode"] = std::string(model::to_token(e.mode));
  Json guide = Json::array();
  for (const auto& s : e.guide) {
    Json sn = Json::object();
    sn["text"] = s.text;
    sn["expected-observation"] = s.expected_observation;
    guide.push_back(std::move(sn));
  }
  node["instantiated-guide"] = std::move(guide);
  if (e.executor) {
    Json ex = Json::object();
    ex["capability"] = e.executor->capability;
    Json params = Json::object();
    for (const auto& [k, v] : e.executor->parameters) params[k] = v;
    ex["parameters"] = std::move(params);
    node["executor"] = std::move(ex);
  }
  return node;
}

PlannedTest planned_test_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  PlannedTest e;
  e.entry_id = r.nonempty("plan-entry-id");
  e.case_id = r.nonempty("case-id");
  e.title = r.string("title");
  e.target_component_id = r.nonempty("target-component-id");
  e.severity = r.enumeration<model::Severity>("severity");
  e.mode = r.enumeration<model::ExecutionMode>("execution-mode");
  const Json& guide = r.array("instantiated-guide");
  for (std::size_t i = 0; i < guide.size(); ++i) {
    const std::string gpath = join_path(r.path_of("instantiated-guide"), i);
    ObjectReader gr(guide[i], gpath);
    GuideStep s;
    s.text = gr.nonempty("text");
    s.expected_observation = gr.string("expected-observation");
    gr.finish();
    require_resolved(s.text, join_path(gpath, "text"));
    require_resolved(s.expected_observation, join_path(gpath, "expected-observation"));
    e.guide.push_back(std::move(s));
  }
  if (const Json* ex = r.optional("executor")) {
    ObjectReader er(*ex, r.path_of("executor"));
    ResolvedExecutor re;
    re.capability = er.nonempty("capability");
    const Json& params = er.required("parameters");
    if (!params.is_object()) {
      throw Error(ErrorCode::Schema, "expected object", er.path_of("parameters"));
    }
    for (auto it = params.begin(); it != params.end(); ++it) {
      const std::string ppath = join_path(er.path_of("parameters"), it.key());
      re.parameters[it.key()] = json_io::as_string(it.value(), ppath);
      require_resolved(re.parameters[it.key()], ppath);
    }
    er.finish();
    e.executor = std::move(re);
  }
  r.finish();
  if ((e.mode != model::ExecutionMode::Manual) != e.executor.has_value()) {
    throw Error(ErrorCode::Invariant, "executor must be present iff mode is not MANUAL",
                r.path_of("executor"));
  }
  if ((e.mode != model::ExecutionMode::Automated) == e.guide.empty()) {
    throw Error(ErrorCode::Invariant, "guide must be non-empty iff mode is not AUTOMATED",
                r.path_of("instantiated-guide"));
  }
  if (e.entry_id != entry_id_for(e.case_id, e.target_component_id)) {
    throw Error(ErrorCode::Invariant, "plan-entry-id does not match case and component",
                r.path_of("plan-entry-id"));
  }
  return e;
}

Json to_json(const TestPlan& plan) {
  Json doc = json_io::envelope(kTestPlanKind);
  doc["plan-id"] = plan.plan_id;
  doc["device-id"] = plan.device_id;
  doc["profile-id"] = plan.profile_id;
  doc["catalog-id"] = plan.catalog_id;
  doc["catalog-version"] = plan.catalog_version;
  doc["created-at"] = format_timestamp(plan.created_at);
  Json entries = Json::array();
  for (const auto& e : plan.entries) entries.push_back(planned_test_to_json(e));
  doc["entries"] = std::move(entries);
  return doc;
}

TestPlan plan_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(kTestPlanKind);
  TestPlan plan;
  plan.plan_id = r.nonempty("plan-id");
  plan.device_id = r.nonempty("device-id");
  plan.profile_id = r.nonempty("profile-id");
  plan.catalog_id = r.nonempty("catalog-id");
  plan.catalog_version = r.nonempty("catalog-version");
  plan.created_at = r.timestamp("created-at");
  const Json& entries = r.array("entries");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string epath = join_path(r.path_of("entries"), i);
    PlannedTest e = planned_test_from_json(entries[i], epath);
    if (!ids.insert(e.entry_id).second) {
      throw Error(ErrorCode::Invariant, "duplicate plan-entry-id '" + e.entry_id + "'", epath);
    }
    if (!plan.entries.empty() && !entry_order_less(plan.entries.back(), e)) {
      throw Error(ErrorCode::Invariant, "entries out of canonical order", epath);
    }
    plan.entries.push_back(std::move(e));
  }
  r.finish();
  return plan;
}

std::string serialize_plan(const TestPlan& plan) { return json_io::canonical(to_json(plan)); }

TestPlan parse_plan(std::string_view bytes) { return plan_from_json(json_io::parse_text(bytes)); }

}  // namespace iotsam::filter
