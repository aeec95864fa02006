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

#include "iotsam/store/documents.hpp"

#include "iotsam/assessment/report.hpp"
#include "iotsam/digest.hpp"
#include "iotsam/model/document.hpp"
#include "iotsam/store/campaign_store.hpp"

namespace iotsam::store {

namespace {

using json_io::Json;

using Validator = void (*)(const Json&);

struct KindValidator {
  std::string_view kind;
  Validator validate;
};

void validate_record(const Json& j);

const std::array<KindValidator, 9>& validators() {
  static const std::array<KindValidator, 9> table{{
      {"device-model", [](const Json& j) { model::device_model_from_json(j); }},
      {"testing-profile", [](const Json& j) { model::testing_profile_from_json(j); }},
      {"test-catalog", [](const Json& j) { model::catalog_from_json(j); }},
      {"assessment-scheme", [](const Json& j) { model::scheme_from_json(j); }},
      {filter::kTestPlanKind, [](const Json& j) { filter::plan_from_json(j); }},
      {harness::kProtocolKind, [](const Json& j) { harness::protocol_from_json(j); }},
      {assessment::kVerdictKind, [](const Json& j) { assessment::verdict_from_json(j); }},
      {assessment::kReportKind, [](const Json& j) { assessment::report_from_json(j); }},
      {kRecordKind, validate_record},
  }};
  return table;
}

// Checks a record's own digest and its embedded document. Chain linkage
// needs the neighbouring records and is left to the store.
void validate_record(const Json& j) {
  json_io::ObjectReader r(j, "");
  r.expect_envelope(kRecordKind);
  if (r.integer("sequence") < 1) throw Error(ErrorCode::Schema, "sequence must be positive", r.path_of("sequence"));
  std::string kind = r.nonempty("record-kind");
  r.timestamp("appended-at");
  r.string("previous-digest");
  const Json& document = r.required("document");
  std::string digest = r.string("digest");
  r.finish();
  Json unsigned_record = j;
  unsigned_record.erase("digest");
  if (sha256_hex(json_io::canonical(unsigned_record)) != digest) {
    throw Error(ErrorCode::Invariant, "record digest mismatch", "/digest");
  }
  if (json_io::document_kind(document) != kind) {
    throw Error(ErrorCode::Invariant, "embedded document is not a " + kind, "/document/kind");
  }
  if (kind == kExecutionStartedKind) {
    json_io::ObjectReader inner(document, "/document");
    inner.expect_envelope(kExecutionStartedKind);
    inner.finish();
    return;
  }
  if (kind == kRecordKind) throw Error(ErrorCode::Invariant, "records do not nest", "/document/kind");
  for (const auto& v : validators()) {
    if (v.kind == kind) {
      v.validate(document);
      return;
    }
  }
  throw Error(ErrorCode::Schema, "unknown record kind '" + kind + "'", "/record-kind");
}

}  // namespace

std::string validate_document(std::string_view bytes) {
  Json doc = json_io::parse_text(bytes);
  std::string kind = json_io::document_kind(doc);
  for (const auto& v : validators()) {
    if (v.kind == kind) {
      v.validate(doc);
      return kind;
    }
  }
  throw Error(ErrorCode::Schema, "unknown document kind '" + kind + "'", "/kind");
}

std::vector<std::string_view> known_document_kinds() {
  std::vector<std::string_view> out;
  for (const auto& v : validators()) out.push_back(v.kind);
  return out;
}

}  // namespace iotsam::store
