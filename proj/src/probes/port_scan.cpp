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

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "iotsam/error.hpp"
#include "iotsam/probes/probes.hpp"
#include "socket.hpp"

namespace iotsam::probes {

void ProbeTarget::validate() const {
  if (host.empty()) throw Error(ErrorCode::Precondition, "probe target host is empty");
  if (port == 0) throw Error(ErrorCode::Precondition, "probe target port must be 1-65535");
  if (connect_timeout.count() <= 0) {
    throw Error(ErrorCode::Precondition, "connect timeout must be positive");
  }
}

harness::PortListPayload tcp_port_scan(const std::string& host, int first, int last,
                                       const ScanOptions& options, std::stop_token stop) {
  if (first < 1 || last > 65535 || first > last) {
    throw Error(ErrorCode::Precondition, "port range " + std::to_string(first) + "-" +
                                             std::to_string(last) + " is empty or out of bounds");
  }
  if (host.empty()) throw Error(ErrorCode::Precondition, "scan host is empty");
  if (options.connect_timeout.count() <= 0) {
    throw Error(ErrorCode::Precondition, "connect timeout must be positive");
  }
  const detail::Endpoint base = detail::resolve(host, 0);

  std::atomic<int> next{first};
  std::atomic<bool> unreachable{false};
  std::mutex mutex;
  std::vector<std::uint16_t> open;

  auto worker = [&] {
    for (;;) {
      if (stop.stop_requested()) return;
      int port = next.fetch_add(1);
      if (port > last) return;
      auto result = detail::connect_with_timeout(
          detail::with_port(base, static_cast<std::uint16_t>(port)), options.connect_timeout);
      if (result.status == detail::ConnectStatus::Connected) {
        std::lock_guard lock(mutex);
        open.push_back(static_cast<std::uint16_t>(port));
      } else if (result.status == detail::ConnectStatus::Unreachable) {
        unreachable = true;
      }
    }
  };

  const std::size_t span = static_cast<std::size_t>(last - first + 1);
  const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, span);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  if (open.empty() && unreachable) {
    throw Error(ErrorCode::HostUnreachable, "no port answered and " + host + " is unreachable");
  }
  std::sort(open.begin(), open.end());
  harness::PortListPayload out;
  out.host = host;
  out.first_port = static_cast<std::uint16_t>(first);
  out.last_port = static_cast<std::uint16_t>(last);
  out.open_ports = std::move(open);
  return out;
}

}  // namespace iotsam::probes
