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

#include "iotsam/model/json_io.hpp"

namespace iotsam::json_io {

Json parse_text(std::string_view bytes) {
  if (bytes.empty()) throw Error(ErrorCode::Syntax, "empty document");
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Syntax, e.what());
  }
}

std::string canonical(const Json& document) { return document.dump(2) + "\n"; }

Json envelope(std::string_view kind) {
  Json doc = Json::object();
  doc["kind"] = std::string(kind);
  doc["schema-version"] = std::string(kSchemaVersion);
  return doc;
}

std::string join_path(std::string_view parent, std::string_view key) {
  std::string out(parent);
  out += '/';
  out += key;
  return out;
}

std::string join_path(std::string_view parent, std::size_t index) {
  return join_path(parent, std::to_string(index));
}

std::string as_string(const Json& node, const std::string& path) {
  if (!node.is_string()) throw Error(ErrorCode::Schema, "expected string", path);
  return node.get<std::string>();
}

std::string as_nonempty_string(const Json& node, const std::string& path) {
  std::string s = as_string(node, path);
  if (s.empty()) throw Error(ErrorCode::Schema, "must not be empty", path);
  return s;
}

std::int64_t as_integer(const Json& node, const std::string& path) {
  if (!node.is_number_integer()) throw Error(ErrorCode::Schema, "expected integer", path);
  if (node.is_number_unsigned() &&
      node.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw Error(ErrorCode::Schema, "integer out of range", path);
  }
  return node.get<std::int64_t>();
}

bool as_boolean(const Json& node, const std::string& path) {
  if (!node.is_boolean()) throw Error(ErrorCode::Schema, "expected boolean", path);
  return node.get<bool>();
}

Timestamp as_timestamp(const Json& node, const std::string& path) {
  auto ts = parse_timestamp(as_string(node, path));
  if (!ts) {
    throw Error(ErrorCode::Schema, "expected timestamp YYYY-MM-DDTHH:MM:SS.ffffffZ", path);
  }
  return *ts;
}

const Json& as_array(const Json& node, const std::string& path) {
  if (!node.is_array()) throw Error(ErrorCode::Schema, "expected array", path);
  return node;
}

ObjectReader::ObjectReader(const Json& node, std::string path)
    : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) {
    throw Error(ErrorCode::Schema, "expected object", path_.empty() ? "/" : path_);
  }
}

const Json& ObjectReader::required(std::string_view key) {
  auto it = node_.find(std::string(key));
  if (it == node_.end()) throw Error(ErrorCode::Schema, "missing field", path_of(key));
  seen_.emplace(key);
  return *it;
}

const Json* ObjectReader::optional(std::string_view key) {
  auto it = node_.find(std::string(key));
  if (it == node_.end()) return nullptr;
  seen_.emplace(key);
  return &*it;
}

void ObjectReader::expect_envelope(std::string_view kind) {
  std::string actual = string("kind");
  if (actual != kind) {
    throw Error(ErrorCode::Schema,
                "expected kind '" + std::string(kind) + "', found '" + actual + "'",
                path_of("kind"));
  }
  std::string version = string("schema-version");
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::Schema, "unsupported schema-version '" + version + "'",
                path_of("schema-version"));
  }
}

void ObjectReader::finish() {
  for (auto it = node_.begin(); it != node_.end(); ++it) {
    if (!seen_.contains(it.key())) {
      throw Error(ErrorCode::Schema, "unknown field", path_of(it.key()));
    }
  }
}

std::string document_kind(const Json& document) {
  if (!document.is_object()) throw Error(ErrorCode::Schema, "expected object", "/");
  auto it = document.find("kind");
  if (it == document.end()) throw Error(ErrorCode::Schema, "missing field", "/kind");
  return as_string(*it, "/kind");
}

}  // namespace iotsam::json_io
