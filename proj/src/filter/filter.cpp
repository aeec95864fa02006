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

#include "iotsam/filter/filter.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "iotsam/digest.hpp"
#include "iotsam/model/placeholders.hpp"

namespace iotsam::filter {

using model::to_token;

const PrerequisiteCheck* ApplicabilityResult::reason(std::string_view name) const {
  for (const auto& r : reasons) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

namespace {

template <model::LevelScale L>
PrerequisiteCheck level_check(std::string_view name, L required, L actual) {
  return {std::string(name), std::string(to_token(required)), std::string(to_token(actual)),
          model::level_leq(required, actual)};
}

std::string level_set_text(const std::set<model::VerificationLevel>& levels) {
  std::string out = "{";
  for (auto level : levels) {
    if (out.size() > 1) out += ",";
    out += to_token(level);
  }
  return out + "}";
}

std::string selector_text(const model::ComponentSelector& s) {
  std::string out = s.kind ? std::string(to_token(*s.kind)) : "ANY";
  for (const auto& c : s.constraints) {
    out += " " + c.attribute + " " + std::string(to_token(c.op));
    if (c.value) out += " " + model::attribute_text(*c.value);
  }
  return out;
}

}  // namespace

ApplicabilityResult is_applicable(const model::TestCase& tc, const model::DeviceModel& device,
                                  const model::TestingProfile& profile) {
  ApplicabilityResult out;
  out.reasons.push_back(level_check(kPrerequisites[0], tc.required_physical, profile.granted_physical));
  out.reasons.push_back(
      level_check(kPrerequisites[1], tc.required_authorization, profile.granted_authorization));
  out.reasons.push_back(
      level_check(kPrerequisites[2], tc.min_data_sensitivity, profile.data_sensitivity));
  out.reasons.push_back(
      level_check(kPrerequisites[3], tc.min_security_impact, profile.security_impact));

  std::vector<const model::DeviceComponent*> selected;
  for (const auto& c : device.components) {
    if (tc.selector.matches(c)) selected.push_back(&c);
  }

  // Verification level: without selector matches the profile-wide level is
  // what would apply.
  PrerequisiteCheck vl{std::string(kPrerequisites[4]), level_set_text(tc.verification_levels), {}, false};
  if (selected.empty()) {
    vl.actual = std::string(to_token(profile.verification_level));
    vl.satisfied = tc.verification_levels.contains(profile.verification_level);
  } else {
    std::string actual;
    for (const auto* c : selected) {
      auto level = profile.effective_verification(c->kind);
      if (!actual.empty()) actual += ",";
      actual += c->id + ":" + std::string(to_token(level));
      if (tc.verification_levels.contains(level)) {
        out.matched_components.push_back(c->id);
        vl.satisfied = true;
      }
    }
    vl.actual = std::move(actual);
  }
  out.reasons.push_back(std::move(vl));

  out.reasons.push_back({std::string(kPrerequisites[5]), selector_text(tc.selector),
                         std::to_string(selected.size()) + " matching component(s)",
                         !selected.empty()});

  out.applicable = std::all_of(out.reasons.begin(), out.reasons.end(),
                               [](const auto& r) { return r.satisfied; }) &&
                   !out.matched_components.empty();
  if (!out.applicable) out.matched_components.clear();
  return out;
}

namespace {

std::string substitute(const std::string& text, const model::TestCase& tc,
                       const model::DeviceComponent& component, const model::DeviceModel& device) {
  std::vector<model::Placeholder> placeholders;
  try {
    placeholders = model::scan_placeholders(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::UnresolvedPlaceholder, e.message() + " (case " + tc.case_id + ")");
  }
  std::string out;
  std::size_t cursor = 0;
  for (const auto& p : placeholders) {
    out.append(text, cursor, p.begin - cursor);
    if (p.ns == model::PlaceholderNamespace::Attr) {
      const model::AttributeValue* v = component.attribute(p.name);
      if (v == nullptr) {
        throw Error(ErrorCode::UnresolvedPlaceholder,
                    p.spelling() + " in case " + tc.case_id + ": component '" + component.id +
                        "' has no attribute '" + p.name + "'");
      }
      out += model::attribute_text(*v);
    } else {
      auto it = device.metadata.find(p.name);
      if (it == device.metadata.end()) {
        throw Error(ErrorCode::UnresolvedPlaceholder,
                    p.spelling() + " in case " + tc.case_id + ": device '" + device.device_id +
                        "' has no metadata '" + p.name + "'");
      }
      out += it->second;
    }
    cursor = p.end;
  }
  out.append(text, cursor, std::string::npos);
  if (out.find("{{") != std::string::npos) {
    throw Error(ErrorCode::UnresolvedPlaceholder,
                "substituted value introduces '{{' in case " + tc.case_id);
  }
  return out;
}

}  // namespace

InstantiatedGuide instantiate_guide(const model::TestCase& tc,
                                    const model::DeviceComponent& component,
                                    const model::DeviceModel& device) {
  InstantiatedGuide out;
  for (const auto& step : tc.manual_steps) {
    out.steps.push_back({substitute(step.instruction, tc, component, device),
                         substitute(step.expected_observation, tc, component, device)});
  }
  if (tc.executor) {
    ResolvedExecutor ex{tc.executor->capability, {}};
    for (const auto& [name, value] : tc.executor->parameters) {
      ex.parameters[name] = substitute(value, tc, component, device);
    }
    out.executor = std::move(ex);
  }
  return out;
}

namespace {

std::string make_plan_id(const model::TestCaseCatalog& catalog, const model::DeviceModel& device,
                         const model::TestingProfile& profile, Timestamp created) {
  std::random_device rd;
  std::string seed = device.device_id + "|" + profile.profile_id + "|" + catalog.catalog_id + "|" +
                     catalog.version + "|" + format_timestamp(created) + "|" +
                     std::to_string(rd()) + std::to_string(rd());
  return "plan-" + sha256_hex(seed).substr(0, 16);
}

}  // namespace

TestPlan filter_catalog(const model::TestCaseCatalog& catalog, const model::DeviceModel& device,
                        const model::TestingProfile& profile, const Clock& clock) {
  TestPlan plan;
  plan.created_at = clock();
  plan.plan_id = make_plan_id(catalog, device, profile, plan.created_at);
  plan.device_id = device.device_id;
  plan.profile_id = profile.profile_id;
  plan.catalog_id = catalog.catalog_id;
  plan.catalog_version = catalog.version;

  for (const auto& tc : catalog.cases) {
    ApplicabilityResult result = is_applicable(tc, device, profile);
    if (!result.applicable) continue;
    for (const auto& component_id : result.matched_components) {
      const model::DeviceComponent& component = *device.find_component(component_id);
      InstantiatedGuide guide = instantiate_guide(tc, component, device);
      PlannedTest entry;
      entry.entry_id = entry_id_for(tc.case_id, component_id);
      entry.case_id = tc.case_id;
      entry.title = tc.title;
      entry.target_component_id = component_id;
      entry.severity = tc.severity;
      entry.mode = tc.mode;
      entry.guide = std::move(guide.steps);
      entry.executor = std::move(guide.executor);
      plan.entries.push_back(std::move(entry));
    }
  }
  std::sort(plan.entries.begin(), plan.entries.end(), entry_order_less);
  return plan;
}

// ---------------------------------------------------------------------------
// coverage

Ratio Ratio::of(std::uint64_t count, std::uint64_t total) {
  if (total == 0) return {0, 1};
  std::uint64_t g = std::gcd(count, total);
  return {count / g, total / g};
}

std::string Ratio::text() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

Ratio operator+(const Ratio& a, const Ratio& b) {
  return Ratio::of(a.numerator * b.denominator + b.numerator * a.denominator,
                   a.denominator * b.denominator);
}

std::size_t CoverageReport::count(model::ExecutionMode mode) const {
  switch (mode) {
    case model::ExecutionMode::Automated: return automated;
    case model::ExecutionMode::SemiAutomated: return semi_automated;
    case model::ExecutionMode::Manual: return manual;
  }
  return 0;
}

Ratio CoverageReport::fraction(model::ExecutionMode mode) const {
  return Ratio::of(count(mode), total);
}

CoverageReport coverage_report(const TestPlan& plan) {
  CoverageReport out;
  out.total = plan.entries.size();
  out.empty = plan.entries.empty();
  for (const auto& e : plan.entries) {
    switch (e.mode) {
      case model::ExecutionMode::Automated: ++out.automated; break;
      case model::ExecutionMode::SemiAutomated: ++out.semi_automated; break;
      case model::ExecutionMode::Manual: ++out.manual; break;
    }
  }
  return out;
}

json_io::Json to_json(const CoverageReport& coverage) {
  json_io::Json node = json_io::Json::object();
  node["total"] = coverage.total;
  node["empty"] = coverage.empty;
  for (auto mode : model::all_values<model::ExecutionMode>()) {
    json_io::Json m = json_io::Json::object();
    m["count"] = coverage.count(mode);
    m["fraction"] = coverage.fraction(mode).text();
    node[std::string(to_token(mode))] = std::move(m);
  }
  return node;
}

CoverageReport coverage_from_json(const json_io::Json& node, const std::string& path) {
  json_io::ObjectReader r(node, path);
  CoverageReport out;
  std::int64_t total = r.integer("total");
  if (total < 0) throw Error(ErrorCode::Invariant, "negative total", r.path_of("total"));
  out.total = static_cast<std::size_t>(total);
  out.empty = r.boolean("empty");
  std::size_t sum = 0;
  for (auto mode : model::all_values<model::ExecutionMode>()) {
    const std::string key(to_token(mode));
    json_io::ObjectReader mr(r.required(key), r.path_of(key));
    std::int64_t count = mr.integer("count");
    if (count < 0) throw Error(ErrorCode::Invariant, "negative count", mr.path_of("count"));
    std::string fraction = mr.string("fraction");
    mr.finish();
    switch (mode) {
      case model::ExecutionMode::Automated: out.automated = static_cast<std::size_t>(count); break;
      case model::ExecutionMode::SemiAutomated: out.semi_automated = static_cast<std::size_t>(count); break;
      case model::ExecutionMode::Manual: out.manual = static_cast<std::size_t>(count); break;
    }
    sum += static_cast<std::size_t>(count);
    if (fraction != out.fraction(mode).text()) {
      throw Error(ErrorCode::Invariant, "fraction inconsistent with counts", mr.path_of("fraction"));
    }
  }
  r.finish();
  if (sum != out.total || out.empty != (out.total == 0)) {
    throw Error(ErrorCode::Invariant, "coverage counts inconsistent with total", path);
  }
  return out;
}

std::string coverage_text(const CoverageReport& coverage) {
  std::ostringstream os;
  if (coverage.empty) {
    os << "coverage: empty plan (0 entries)\n";
    return os.str();
  }
  os << "coverage: " << coverage.total << " entries\n";
  for (auto mode : model::all_values<model::ExecutionMode>()) {
    Ratio r = coverage.fraction(mode);
    char pct[16];
    std::snprintf(pct, sizeof pct, "%.1f%%", 100.0 * r.value());
    os << "  " << to_token(mode) << ": " << coverage.count(mode) << "/" << coverage.total << " ("
       << pct << ")\n";
  }
  return os.str();
}

}  // namespace iotsam::filter
