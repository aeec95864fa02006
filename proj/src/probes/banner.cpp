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

#include <cstdio>

#include "iotsam/probes/probes.hpp"
#include "socket.hpp"

namespace iotsam::probes {

namespace {
// Once data has started arriving, a pause this long ends the banner.
constexpr Millis kIdleGap{250};
}  // namespace

std::string sanitize_banner(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if ((c >= 0x20 && c < 0x7f) || c == '\t' || c == '\r' || c == '\n') {
      out.push_back(ch);
    } else {
      char esc[5];
      std::snprintf(esc, sizeof esc, "\\x%02X", c);
      out += esc;
    }
  }
  return out;
}

harness::BannerPayload service_banner_grab(const ProbeTarget& target, Millis read_timeout) {
  target.validate();
  detail::Socket sock = detail::connect_or_throw(target.host, target.port, target.connect_timeout);

  std::string raw;
  const auto deadline = std::chrono::steady_clock::now() + read_timeout;
  while (raw.size() < kMaxBannerBytes) {
    auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) break;
    Millis wait = raw.empty() ? left : std::min(left, kIdleGap);
    if (detail::read_some(sock.fd(), raw, kMaxBannerBytes - raw.size(), wait) !=
        detail::ReadStatus::Data) {
      break;
    }
  }

  const bool unprompted = !raw.empty();
  while (!raw.empty() && (raw.back() == '\n' || raw.back() == '\r')) raw.pop_back();

  harness::BannerPayload out;
  out.host = target.host;
  out.port = target.port;
  out.unprompted = unprompted;
  out.banner = sanitize_banner(raw);
  return out;
}

}  // namespace iotsam::probes
