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

#include <array>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>

namespace iotsam::model {

/// Specialize with `static constexpr std::array entries` of
/// (value, token) pairs to make an enumeration serializable.
template <typename E>
struct EnumTraits;

template <typename E>
concept TokenEnum = std::is_enum_v<E> && requires {
  { EnumTraits<E>::entries.size() } -> std::convertible_to<std::size_t>;
};

template <TokenEnum E>
constexpr std::string_view to_token(E value) {
  for (const auto& [v, name] : EnumTraits<E>::entries) {
    if (v == value) return name;
  }
  return {};
}

template <TokenEnum E>
constexpr std::optional<E> from_token(std::string_view token) {
  for (const auto& [v, name] : EnumTraits<E>::entries) {
    if (name == token) return v;
  }
  return std::nullopt;
}

template <TokenEnum E>
constexpr auto all_values() {
  std::array<E, EnumTraits<E>::entries.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = EnumTraits<E>::entries[i].first;
  return out;
}

}  // namespace iotsam::model
