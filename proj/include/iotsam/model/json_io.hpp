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

#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"

#include "iotsam/error.hpp"
#include "iotsam/model/tokens.hpp"
#include "iotsam/timestamp.hpp"

namespace iotsam::json_io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

/// Parses UTF-8 JSON text. Empty or malformed input raises SYNTAX.
Json parse_text(std::string_view bytes);

/// Canonical byte form: two-space indentation, keys in insertion order,
/// trailing newline.
std::string canonical(const Json& document);

/// Fresh document object carrying `kind` and `schema-version`.
Json envelope(std::string_view kind);

std::string join_path(std::string_view parent, std::string_view key);
std::string join_path(std::string_view parent, std::size_t index);

std::string as_string(const Json& node, const std::string& path);
std::string as_nonempty_string(const Json& node, const std::string& path);
std::int64_t as_integer(const Json& node, const std::string& path);
bool as_boolean(const Json& node, const std::string& path);
Timestamp as_timestamp(const Json& node, const std::string& path);
const Json& as_array(const Json& node, const std::string& path);

template <model::TokenEnum E>
E as_enum(const Json& node, const std::string& path) {
  std::string token = as_string(node, path);
  if (auto v = model::from_token<E>(token)) return *v;
  throw Error(ErrorCode::Schema, "unknown token '" + token + "'", path);
}

/// Field-by-field reader for a JSON object. Every key must be consumed
/// before finish(), otherwise the leftover key is reported as SCHEMA.
class ObjectReader {
 public:
  ObjectReader(const Json& node, std::string path);

  const Json& required(std::string_view key);
  const Json* optional(std::string_view key);

  std::string string(std::string_view key) { return as_string(required(key), path_of(key)); }
  std::string nonempty(std::string_view key) {
    return as_nonempty_string(required(key), path_of(key));
  }
  std::int64_t integer(std::string_view key) { return as_integer(required(key), path_of(key)); }
  bool boolean(std::string_view key) { return as_boolean(required(key), path_of(key)); }
  Timestamp timestamp(std::string_view key) {
    return as_timestamp(required(key), path_of(key));
  }
  const Json& array(std::string_view key) { return as_array(required(key), path_of(key)); }
  template <model::TokenEnum E>
  E enumeration(std::string_view key) {
    return as_enum<E>(required(key), path_of(key));
  }

  /// Checks `kind` and `schema-version` of a top-level document.
  void expect_envelope(std::string_view kind);

  void finish();

  std::string path_of(std::string_view key) const { return join_path(path_, key); }
  const std::string& path() const { return path_; }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

/// Peeks at the top-level `kind` of a document without validating the rest.
std::string document_kind(const Json& document);

}  // namespace iotsam::json_io
