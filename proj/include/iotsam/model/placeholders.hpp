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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace iotsam::model {

/// `{{attr:NAME}}` resolves against the matched component's attributes,
/// `{{device:KEY}}` against the device model's metadata.
enum class PlaceholderNamespace { Attr, Device };

struct Placeholder {
  PlaceholderNamespace ns;
  std::string name;
  std::size_t begin;  // offset of the opening "{{"
  std::size_t end;    // one past the closing "}}"

  std::string spelling() const;
};

/// Lists placeholders in template order. Throws SCHEMA (path left empty
/// for the caller to fill in) on an unterminated "{{", an unknown namespace,
/// or an empty name.
std::vector<Placeholder> scan_placeholders(std::string_view text);

}  // namespace iotsam::model
