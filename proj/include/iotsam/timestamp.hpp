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

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace iotsam {

/// Wall-clock instant at microsecond resolution. Documents carry timestamps
/// as RFC 3339 UTC text with exactly six fractional digits, so a Timestamp
/// survives a text round trip unchanged.
using Timestamp =
    std::chrono::time_point<std::chrono::system_clock, std::chrono::microseconds>;

using Clock = std::function<Timestamp()>;

Timestamp now();
Clock system_clock();

std::string format_timestamp(Timestamp ts);
std::optional<Timestamp> parse_timestamp(std::string_view text);

}  // namespace iotsam
