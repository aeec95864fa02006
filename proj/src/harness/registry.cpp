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

#include "iotsam/harness/registry.hpp"

#include <charconv>

namespace iotsam::harness {

namespace {

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<PortRange> parse_port_range(std::string_view text) {
  std::size_t dash = text.find('-');
  auto first = parse_int(text.substr(0, dash));
  auto last = dash == std::string_view::npos ? first : parse_int(text.substr(dash + 1));
  if (!first || !last || *first < 1 || *last > 65535 || *first > *last) return std::nullopt;
  return PortRange{static_cast<std::uint16_t>(*first), static_cast<std::uint16_t>(*last)};
}

const std::string& Parameters::text(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<std::string>(it->second)) {
    throw Error(ErrorCode::InvalidParameters, "missing text parameter '" + name + "'");
  }
  return std::get<std::string>(it->second);
}

std::int64_t Parameters::integer(const std::string& name, std::int64_t fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return fallback;
  return integer(name);
}

std::int64_t Parameters::integer(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<std::int64_t>(it->second)) {
    throw Error(ErrorCode::InvalidParameters, "missing integer parameter '" + name + "'");
  }
  return std::get<std::int64_t>(it->second);
}

bool Parameters::boolean(const std::string& name, bool fallback) const {
  auto it = values_.find(name);
  if (it == values_.end()) return fallback;
  if (!std::holds_alternative<bool>(it->second)) {
    throw Error(ErrorCode::InvalidParameters, "parameter '" + name + "' is not boolean");
  }
  return std::get<bool>(it->second);
}

PortRange Parameters::port_range(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<PortRange>(it->second)) {
    throw Error(ErrorCode::InvalidParameters, "missing port-range parameter '" + name + "'");
  }
  return std::get<PortRange>(it->second);
}

Parameters validate_parameters(const ExecutorDescriptor& descriptor,
                               const std::map<std::string, std::string>& raw) {
  std::map<std::string, ParameterValue> values;
  for (const auto& [name, text] : raw) {
    if (name == kTimeoutParameter) continue;
    const ParameterSpec* spec = nullptr;
    for (const auto& s : descriptor.parameters) {
      if (s.name == name) spec = &s;
    }
    if (spec == nullptr) {
      throw Error(ErrorCode::InvalidParameters,
                  "'" + descriptor.capability + "' has no parameter '" + name + "'");
    }
    auto bad = [&] {
      return Error(ErrorCode::InvalidParameters,
                   "parameter '" + name + "' = '" + text + "' is not a valid " +
                       std::string(model::to_token(spec->type)));
    };
    switch (spec->type) {
      case ParameterType::String: values[name] = text; break;
      case ParameterType::Integer: {
        auto v = parse_int(text);
        if (!v) throw bad();
        values[name] = *v;
        break;
      }
      case ParameterType::Boolean:
        if (text == "true") values[name] = true;
        else if (text == "false") values[name] = false;
        else throw bad();
        break;
      case ParameterType::PortRange: {
        auto v = parse_port_range(text);
        if (!v) throw bad();
        values[name] = *v;
        break;
      }
    }
  }
  for (const auto& s : descriptor.parameters) {
    if (s.required && !values.contains(s.name)) {
      throw Error(ErrorCode::InvalidParameters,
                  "'" + descriptor.capability + "' requires parameter '" + s.name + "'");
    }
  }
  return Parameters(std::move(values));
}

ExecutorRegistry& ExecutorRegistry::register_executor(ExecutorDescriptor descriptor,
                                                      ExecutorBehavior behavior,
                                                      VerdictMapper verdict) {
  if (executors_.contains(descriptor.capability)) {
    throw Error(ErrorCode::DuplicateCapability,
                "capability '" + descriptor.capability + "' already registered");
  }
  std::string key = descriptor.capability;
  executors_.emplace(std::move(key), RegisteredExecutor{std::move(descriptor), std::move(behavior),
                                                        std::move(verdict)});
  return *this;
}

const RegisteredExecutor* ExecutorRegistry::find(std::string_view capability) const {
  auto it = executors_.find(capability);
  return it == executors_.end() ? nullptr : &it->second;
}

std::vector<ExecutorDescriptor> ExecutorRegistry::list() const {
  std::vector<ExecutorDescriptor> out;
  for (const auto& [_, e] : executors_) out.push_back(e.descriptor);
  return out;
}

json_io::Json to_json(const ExecutorDescriptor& d) {
  json_io::Json n = json_io::Json::object();
  n["capability"] = d.capability;
  n["version"] = d.version;
  json_io::Json params = json_io::Json::array();
  for (const auto& p : d.parameters) {
    json_io::Json pn = json_io::Json::object();
    pn["name"] = p.name;
    pn["type"] = std::string(model::to_token(p.type));
    pn["required"] = p.required;
    params.push_back(std::move(pn));
  }
  n["parameters"] = std::move(params);
  json_io::Json produces = json_io::Json::array();
  for (auto k : d.produces) produces.push_back(std::string(model::to_token(k)));
  n["produces"] = std::move(produces);
  return n;
}

}  // namespace iotsam::harness
