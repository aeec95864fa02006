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

#include "iotsam/model/document.hpp"

#include <set>

#include "iotsam/model/placeholders.hpp"

namespace iotsam::model {

using json_io::Json;
using json_io::ObjectReader;
using json_io::join_path;

// ---------------------------------------------------------------------------
// placeholders

std::string Placeholder::spelling() const {
  return std::string("{{") + (ns == PlaceholderNamespace::Attr ? "attr:" : "device:") + name +
         "}}";
}

std::vector<Placeholder> scan_placeholders(std::string_view text) {
  std::vector<Placeholder> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    std::size_t close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::Schema, "unterminated placeholder in template");
    }
    std::string_view body = text.substr(pos + 2, close - pos - 2);
    std::size_t colon = body.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::Schema, "placeholder '{{" + std::string(body) + "}}' lacks a namespace");
    }
    std::string_view ns = body.substr(0, colon);
    std::string_view name = body.substr(colon + 1);
    Placeholder p{};
    if (ns == "attr") {
      p.ns = PlaceholderNamespace::Attr;
    } else if (ns == "device") {
      p.ns = PlaceholderNamespace::Device;
    } else {
      throw Error(ErrorCode::Schema, "unknown placeholder namespace '" + std::string(ns) + "'");
    }
    if (name.empty() || name.find_first_of(" \t\r\n{}") != std::string_view::npos) {
      throw Error(ErrorCode::Schema, "invalid placeholder name '" + std::string(name) + "'");
    }
    p.name = std::string(name);
    p.begin = pos;
    p.end = close + 2;
    out.push_back(std::move(p));
    pos = close + 2;
  }
  return out;
}

namespace {

void check_template(const std::string& text, const std::string& path) {
  try {
    scan_placeholders(text);
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), path);
  }
}

template <TokenEnum E>
Json token(E value) {
  return std::string(to_token(value));
}

}  // namespace

// ---------------------------------------------------------------------------
// attributes

Json attribute_to_json(const AttributeValue& value) {
  return std::visit([](const auto& v) { return Json(v); }, value);
}

AttributeValue attribute_from_json(const Json& node, const std::string& path) {
  if (node.is_string()) return node.get<std::string>();
  if (node.is_boolean()) return node.get<bool>();
  if (node.is_number_integer()) return json_io::as_integer(node, path);
  throw Error(ErrorCode::Schema, "attribute value must be text, integer or boolean", path);
}

// ---------------------------------------------------------------------------
// device model

Json to_json(const DeviceModel& value) {
  Json doc = json_io::envelope(to_token(DocumentKind::DeviceModel));
  doc["device-id"] = value.device_id;
  doc["display-name"] = value.display_name;
  Json components = Json::array();
  for (const auto& c : value.components) {
    Json node = Json::object();
    node["component-id"] = c.id;
    node["kind"] = token(c.kind);
    Json attrs = Json::object();
    for (const auto& [name, v] : c.attributes) attrs[name] = attribute_to_json(v);
    node["attributes"] = std::move(attrs);
    components.push_back(std::move(node));
  }
  doc["components"] = std::move(components);
  Json metadata = Json::object();
  for (const auto& [k, v] : value.metadata) metadata[k] = v;
  doc["metadata"] = std::move(metadata);
  return doc;
}

namespace {

void validate_component_attributes(const DeviceComponent& c, const std::string& path) {
  const std::string attrs_path = join_path(path, "attributes");
  if (c.kind == ComponentKind::WirelessInterface) {
    if (const AttributeValue* p = c.attribute("protocol")) {
      const auto* s = std::get_if<std::string>(p);
      if (s == nullptr || !is_wireless_protocol(*s)) {
        throw Error(ErrorCode::Schema, "protocol outside the closed vocabulary",
                    join_path(attrs_path, "protocol"));
      }
    }
  }
  if (c.kind == ComponentKind::NetworkService) {
    const AttributeValue* host = c.attribute("host");
    const auto* host_text = host ? std::get_if<std::string>(host) : nullptr;
    if (host_text == nullptr || host_text->empty()) {
      throw Error(ErrorCode::Schema, "network service requires a text host",
                  join_path(attrs_path, "host"));
    }
    const AttributeValue* port = c.attribute("port");
    const auto* port_number = port ? std::get_if<std::int64_t>(port) : nullptr;
    if (port_number == nullptr || *port_number < 1 || *port_number > 65535) {
      throw Error(ErrorCode::Schema, "network service requires an integer port 1-65535",
                  join_path(attrs_path, "port"));
    }
    const AttributeValue* service = c.attribute("service");
    const auto* service_text = service ? std::get_if<std::string>(service) : nullptr;
    if (service_text == nullptr || service_text->empty()) {
      throw Error(ErrorCode::Schema, "network service requires a text service",
                  join_path(attrs_path, "service"));
    }
  }
}

}  // namespace

DeviceModel device_model_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(to_token(DocumentKind::DeviceModel));
  DeviceModel out;
  out.device_id = r.nonempty("device-id");
  out.display_name = r.string("display-name");

  const Json& components = r.array("components");
  const std::string components_path = r.path_of("components");
  if (components.empty()) {
    throw Error(ErrorCode::Invariant, "device model needs at least one component",
                components_path);
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const std::string cpath = join_path(components_path, i);
    ObjectReader cr(components[i], cpath);
    DeviceComponent c;
    c.id = cr.nonempty("component-id");
    c.kind = cr.enumeration<ComponentKind>("kind");
    const Json& attrs = cr.required("attributes");
    if (!attrs.is_object()) {
      throw Error(ErrorCode::Schema, "expected object", cr.path_of("attributes"));
    }
    for (auto it = attrs.begin(); it != attrs.end(); ++it) {
      c.attributes[it.key()] =
          attribute_from_json(it.value(), join_path(cr.path_of("attributes"), it.key()));
    }
    cr.finish();
    validate_component_attributes(c, cpath);
    if (!ids.insert(c.id).second) {
      throw Error(ErrorCode::Invariant, "duplicate component-id '" + c.id + "'",
                  join_path(cpath, "component-id"));
    }
    out.components.push_back(std::move(c));
  }

  const Json& metadata = r.required("metadata");
  if (!metadata.is_object()) {
    throw Error(ErrorCode::Schema, "expected object", r.path_of("metadata"));
  }
  for (auto it = metadata.begin(); it != metadata.end(); ++it) {
    out.metadata[it.key()] =
        json_io::as_string(it.value(), join_path(r.path_of("metadata"), it.key()));
  }
  r.finish();
  return out;
}

// ---------------------------------------------------------------------------
// testing profile

Json to_json(const TestingProfile& value) {
  Json doc = json_io::envelope(to_token(DocumentKind::TestingProfile));
  doc["profile-id"] = value.profile_id;
  doc["granted-physical"] = token(value.granted_physical);
  doc["granted-authorization"] = token(value.granted_authorization);
  doc["device-data-sensitivity"] = token(value.data_sensitivity);
  doc["device-security-impact"] = token(value.security_impact);
  doc["verification-level"] = token(value.verification_level);
  Json ecosystem = Json::array();
  for (const auto& s : value.ecosystem) {
    Json node = Json::object();
    node["system-id"] = s.id;
    node["kind"] = token(s.kind);
    node["endpoint"] = s.endpoint;
    node["in-scope"] = s.in_scope;
    ecosystem.push_back(std::move(node));
  }
  doc["ecosystem"] = std::move(ecosystem);
  Json overrides = Json::object();
  // Enumeration order, not token order, keeps the map order stable.
  for (const auto& [kind, level] : value.verification_overrides) {
    overrides[std::string(to_token(kind))] = token(level);
  }
  doc["verification-overrides"] = std::move(overrides);
  return doc;
}

TestingProfile testing_profile_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(to_token(DocumentKind::TestingProfile));
  TestingProfile out;
  out.profile_id = r.nonempty("profile-id");
  out.granted_physical = r.enumeration<PhysicalAccess>("granted-physical");
  out.granted_authorization = r.enumeration<AuthorizationAccess>("granted-authorization");
  out.data_sensitivity = r.enumeration<DataSensitivity>("device-data-sensitivity");
  out.security_impact = r.enumeration<SecurityImpact>("device-security-impact");
  out.verification_level = r.enumeration<VerificationLevel>("verification-level");

  const Json& ecosystem = r.array("ecosystem");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < ecosystem.size(); ++i) {
    const std::string spath = join_path(r.path_of("ecosystem"), i);
    ObjectReader sr(ecosystem[i], spath);
    EcosystemSystem s;
    s.id = sr.nonempty("system-id");
    s.kind = sr.enumeration<EcosystemKind>("kind");
    s.endpoint = sr.string("endpoint");
    s.in_scope = sr.boolean("in-scope");
    sr.finish();
    if (!ids.insert(s.id).second) {
      throw Error(ErrorCode::Invariant, "duplicate system-id '" + s.id + "'",
                  join_path(spath, "system-id"));
    }
    out.ecosystem.push_back(std::move(s));
  }

  const Json& overrides = r.required("verification-overrides");
  const std::string opath = r.path_of("verification-overrides");
  if (!overrides.is_object()) throw Error(ErrorCode::Schema, "expected object", opath);
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    auto kind = from_token<ComponentKind>(it.key());
    if (!kind) {
      throw Error(ErrorCode::Schema, "unknown component kind '" + it.key() + "'",
                  join_path(opath, it.key()));
    }
    out.verification_overrides[*kind] =
        json_io::as_enum<VerificationLevel>(it.value(), join_path(opath, it.key()));
  }
  r.finish();
  return out;
}

// ---------------------------------------------------------------------------
// catalog

namespace {

Json selector_to_json(const ComponentSelector& s) {
  Json node = Json::object();
  node["kind"] = s.kind ? token(*s.kind) : Json("ANY");
  Json constraints = Json::array();
  for (const auto& c : s.constraints) {
    Json cn = Json::object();
    cn["attribute"] = c.attribute;
    cn["operator"] = token(c.op);
    if (c.value) cn["value"] = attribute_to_json(*c.value);
    constraints.push_back(std::move(cn));
  }
  node["constraints"] = std::move(constraints);
  return node;
}

ComponentSelector selector_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  ComponentSelector out;
  std::string kind = r.string("kind");
  if (kind != "ANY") {
    auto k = from_token<ComponentKind>(kind);
    if (!k) throw Error(ErrorCode::Schema, "unknown token '" + kind + "'", r.path_of("kind"));
    out.kind = *k;
  }
  const Json& constraints = r.array("constraints");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const std::string cpath = join_path(r.path_of("constraints"), i);
    ObjectReader cr(constraints[i], cpath);
    AttributeConstraint c;
    c.attribute = cr.nonempty("attribute");
    c.op = cr.enumeration<SelectorOp>("operator");
    const Json* value = cr.optional("value");
    if (c.op == SelectorOp::Present && value != nullptr) {
      throw Error(ErrorCode::Schema, "PRESENT takes no value", cr.path_of("value"));
    }
    if (c.op != SelectorOp::Present) {
      if (value == nullptr) {
        throw Error(ErrorCode::Schema, "EQ/NEQ require a value", cr.path_of("value"));
      }
      c.value = attribute_from_json(*value, cr.path_of("value"));
    }
    cr.finish();
    out.constraints.push_back(std::move(c));
  }
  r.finish();
  return out;
}

Json case_to_json(const TestCase& c) {
  Json node = Json::object();
  node["case-id"] = c.case_id;
  node["title"] = c.title;
  node["description"] = c.description;
  node["required-physical"] = token(c.required_physical);
  node["required-authorization"] = token(c.required_authorization);
  node["min-data-sensitivity"] = token(c.min_data_sensitivity);
  node["min-security-impact"] = token(c.min_security_impact);
  Json levels = Json::array();
  for (auto level : c.verification_levels) levels.push_back(token(level));
  node["verification-levels"] = std::move(levels);
  node["selector"] = selector_to_json(c.selector);
  node["severity"] = token(c.severity);
  node["execution-mode"] = token(c.mode);
  if (c.executor) {
    Json ref = Json::object();
    ref["capability"] = c.executor->capability;
    Json params = Json::object();
    for (const auto& [k, v] : c.executor->parameters) params[k] = v;
    ref["parameters"] = std::move(params);
    node["executor-ref"] = std::move(ref);
  }
  Json steps = Json::array();
  for (const auto& s : c.manual_steps) {
    Json sn = Json::object();
    sn["instruction"] = s.instruction;
    sn["expected-observation"] = s.expected_observation;
    steps.push_back(std::move(sn));
  }
  node["manual-steps"] = std::move(steps);
  Json refs = Json::array();
  for (const auto& ref : c.references) refs.push_back(ref);
  node["references"] = std::move(refs);
  return node;
}

TestCase case_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  TestCase c;
  c.case_id = r.nonempty("case-id");
  c.title = r.string("title");
  c.description = r.string("description");
  c.required_physical = r.enumeration<PhysicalAccess>("required-physical");
  c.required_authorization = r.enumeration<AuthorizationAccess>("required-authorization");
  c.min_data_sensitivity = r.enumeration<DataSensitivity>("min-data-sensitivity");
  c.min_security_impact = r.enumeration<SecurityImpact>("min-security-impact");

  const Json& levels = r.array("verification-levels");
  const std::string lpath = r.path_of("verification-levels");
  if (levels.empty()) {
    throw Error(ErrorCode::Invariant, "verification-levels must not be empty", lpath);
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    auto level = json_io::as_enum<VerificationLevel>(levels[i], join_path(lpath, i));
    if (!c.verification_levels.insert(level).second) {
      throw Error(ErrorCode::Invariant, "duplicate verification level", join_path(lpath, i));
    }
  }

  c.selector = selector_from_json(r.required("selector"), r.path_of("selector"));
  c.severity = r.enumeration<Severity>("severity");
  c.mode = r.enumeration<ExecutionMode>("execution-mode");

  if (const Json* ref = r.optional("executor-ref")) {
    ObjectReader er(*ref, r.path_of("executor-ref"));
    ExecutorRef e;
    e.capability = er.nonempty("capability");
    const Json& params = er.required("parameters");
    if (!params.is_object()) {
      throw Error(ErrorCode::Schema, "expected object", er.path_of("parameters"));
    }
    for (auto it = params.begin(); it != params.end(); ++it) {
      const std::string ppath = join_path(er.path_of("parameters"), it.key());
      e.parameters[it.key()] = json_io::as_string(it.value(), ppath);
      check_template(e.parameters[it.key()], ppath);
    }
    er.finish();
    c.executor = std::move(e);
  }

  const Json& steps = r.array("manual-steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string spath = join_path(r.path_of("manual-steps"), i);
    ObjectReader sr(steps[i], spath);
    ManualStep s;
    s.instruction = sr.nonempty("instruction");
    s.expected_observation = sr.string("expected-observation");
    sr.finish();
    check_template(s.instruction, join_path(spath, "instruction"));
    check_template(s.expected_observation, join_path(spath, "expected-observation"));
    c.manual_steps.push_back(std::move(s));
  }

  const Json& refs = r.array("references");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    c.references.push_back(json_io::as_string(refs[i], join_path(r.path_of("references"), i)));
  }
  r.finish();

  const bool needs_executor = c.mode != ExecutionMode::Manual;
  const bool needs_steps = c.mode != ExecutionMode::Automated;
  if (needs_executor != c.executor.has_value()) {
    throw Error(ErrorCode::Invariant,
                needs_executor ? "case '" + c.case_id + "' needs an executor-ref"
                               : "MANUAL case '" + c.case_id + "' must not carry an executor-ref",
                r.path_of("executor-ref"));
  }
  if (needs_steps != !c.manual_steps.empty()) {
    throw Error(ErrorCode::Invariant,
                needs_steps ? "case '" + c.case_id + "' needs manual-steps"
                            : "AUTOMATED case '" + c.case_id + "' must not carry manual-steps",
                r.path_of("manual-steps"));
  }
  return c;
}

}  // namespace

Json to_json(const TestCaseCatalog& value) {
  Json doc = json_io::envelope(to_token(DocumentKind::TestCatalog));
  doc["catalog-id"] = value.catalog_id;
  doc["version"] = value.version;
  Json cases = Json::array();
  for (const auto& c : value.cases) cases.push_back(case_to_json(c));
  doc["cases"] = std::move(cases);
  return doc;
}

TestCaseCatalog catalog_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(to_token(DocumentKind::TestCatalog));
  TestCaseCatalog out;
  out.catalog_id = r.nonempty("catalog-id");
  out.version = r.nonempty("version");
  const Json& cases = r.array("cases");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string cpath = join_path(r.path_of("cases"), i);
    TestCase c = case_from_json(cases[i], cpath);
    if (!ids.insert(c.case_id).second) {
      throw Error(ErrorCode::Invariant, "duplicate case-id '" + c.case_id + "'",
                  join_path(cpath, "case-id"));
    }
    out.cases.push_back(std::move(c));
  }
  r.finish();
  return out;
}

// ---------------------------------------------------------------------------
// assessment scheme

Json to_json(const AssessmentScheme& value) {
  Json doc = json_io::envelope(to_token(DocumentKind::AssessmentScheme));
  doc["scheme-id"] = value.scheme_id;
  doc["critical-rule"] = std::string(kCriticalRule);
  doc["major-fail-threshold"] = value.major_fail_threshold;
  doc["minor-fail-threshold"] = value.minor_fail_threshold;
  doc["inconclusive-policy"] = token(value.inconclusive_policy);
  doc["skipped-policy"] = std::string(kSkippedPolicy);
  return doc;
}

AssessmentScheme scheme_from_json(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  r.expect_envelope(to_token(DocumentKind::AssessmentScheme));
  AssessmentScheme out;
  out.scheme_id = r.nonempty("scheme-id");
  if (r.string("critical-rule") != kCriticalRule) {
    throw Error(ErrorCode::Schema, "critical-rule is fixed to AUTO_FAIL",
                r.path_of("critical-rule"));
  }
  auto threshold = [&](std::string_view key) {
    std::int64_t v = r.integer(key);
    if (v < 0 || v > UINT32_MAX) {
      throw Error(ErrorCode::Invariant, "threshold must be a non-negative integer",
                  r.path_of(key));
    }
    return static_cast<std::uint32_t>(v);
  };
  out.major_fail_threshold = threshold("major-fail-threshold");
  out.minor_fail_threshold = threshold("minor-fail-threshold");
  out.inconclusive_policy = r.enumeration<InconclusivePolicy>("inconclusive-policy");
  if (r.string("skipped-policy") != kSkippedPolicy) {
    throw Error(ErrorCode::Schema, "skipped-policy is fixed to EXCLUDE",
                r.path_of("skipped-policy"));
  }
  r.finish();
  return out;
}

// ---------------------------------------------------------------------------
// entry points

template <>
DeviceModel parse_as<DeviceModel>(std::string_view bytes) {
  return device_model_from_json(json_io::parse_text(bytes));
}
template <>
TestingProfile parse_as<TestingProfile>(std::string_view bytes) {
  return testing_profile_from_json(json_io::parse_text(bytes));
}
template <>
TestCaseCatalog parse_as<TestCaseCatalog>(std::string_view bytes) {
  return catalog_from_json(json_io::parse_text(bytes));
}
template <>
AssessmentScheme parse_as<AssessmentScheme>(std::string_view bytes) {
  return scheme_from_json(json_io::parse_text(bytes));
}

Document parse_document(std::string_view bytes, DocumentKind expected) {
  switch (expected) {
    case DocumentKind::DeviceModel: return parse_as<DeviceModel>(bytes);
    case DocumentKind::TestingProfile: return parse_as<TestingProfile>(bytes);
    case DocumentKind::TestCatalog: return parse_as<TestCaseCatalog>(bytes);
    case DocumentKind::AssessmentScheme: return parse_as<AssessmentScheme>(bytes);
  }
  throw Error(ErrorCode::Schema, "unsupported document kind");
}

std::string serialize_document(const DeviceModel& value) {
  return json_io::canonical(to_json(value));
}
std::string serialize_document(const TestingProfile& value) {
  return json_io::canonical(to_json(value));
}
std::string serialize_document(const TestCaseCatalog& value) {
  return json_io::canonical(to_json(value));
}
std::string serialize_document(const AssessmentScheme& value) {
  return json_io::canonical(to_json(value));
}
std::string serialize_document(const Document& value) {
  return std::visit([](const auto& v) { return serialize_document(v); }, value);
}

}  // namespace iotsam::model
