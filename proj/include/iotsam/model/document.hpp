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

#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "iotsam/model/json_io.hpp"
#include "iotsam/model/types.hpp"

namespace iotsam::model {

enum class DocumentKind { DeviceModel, TestingProfile, TestCatalog, AssessmentScheme };

template <>
struct EnumTraits<DocumentKind> {
  static constexpr std::array entries{
      std::pair{DocumentKind::DeviceModel, std::string_view{"device-model"}},
      std::pair{DocumentKind::TestingProfile, std::string_view{"testing-profile"}},
      std::pair{DocumentKind::TestCatalog, std::string_view{"test-catalog"}},
      std::pair{DocumentKind::AssessmentScheme, std::string_view{"assessment-scheme"}},
  };
};

using Document = std::variant<DeviceModel, TestingProfile, TestCaseCatalog, AssessmentScheme>;

/// Parses and fully validates one canonical document of the expected kind.
/// Errors: SYNTAX (malformed text), SCHEMA (missing, extra or ill-typed
/// field, closed-vocabulary violation), INVARIANT (uniqueness and
/// consistency rules). The error path locates the offending field.
Document parse_document(std::string_view bytes, DocumentKind expected);

template <typename T>
T parse_as(std::string_view bytes);

template <>
DeviceModel parse_as<DeviceModel>(std::string_view bytes);
template <>
TestingProfile parse_as<TestingProfile>(std::string_view bytes);
template <>
TestCaseCatalog parse_as<TestCaseCatalog>(std::string_view bytes);
template <>
AssessmentScheme parse_as<AssessmentScheme>(std::string_view bytes);

std::string serialize_document(const DeviceModel& value);
std::string serialize_document(const TestingProfile& value);
std::string serialize_document(const TestCaseCatalog& value);
std::string serialize_document(const AssessmentScheme& value);
std::string serialize_document(const Document& value);

// Tree-level codecs, for documents that embed these values.
json_io::Json to_json(const DeviceModel& value);
json_io::Json to_json(const TestingProfile& value);
json_io::Json to_json(const TestCaseCatalog& value);
json_io::Json to_json(const AssessmentScheme& value);
DeviceModel device_model_from_json(const json_io::Json& node, const std::string& path = {});
TestingProfile testing_profile_from_json(const json_io::Json& node, const std::string& path = {});
TestCaseCatalog catalog_from_json(const json_io::Json& node, const std::string& path = {});
AssessmentScheme scheme_from_json(const json_io::Json& node, const std::string& path = {});

json_io::Json attribute_to_json(const AttributeValue& value);
AttributeValue attribute_from_json(const json_io::Json& node, const std::string& path);

}  // namespace iotsam::model
