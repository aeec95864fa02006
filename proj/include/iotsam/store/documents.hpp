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
#include <vector>

namespace iotsam::store {

/// Fully validates a document of any kind this tool reads or writes and
/// returns its kind. SYNTAX / SCHEMA / INVARIANT as for the specific parser;
/// SCHEMA for an unknown kind.
std::string validate_document(std::string_view bytes);

/// Document kinds validate_document understands.
std::vector<std::string_view> known_document_kinds();

}  // namespace iotsam::store
