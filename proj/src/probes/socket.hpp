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

#include <sys/socket.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iotsam::probes::detail {

using Millis = std::chrono::milliseconds;

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }

 private:
  int fd_ = -1;
};

struct Endpoint {
  sockaddr_storage address{};
  socklen_t length = 0;
};

/// Resolves host (IP literal or name) to its first address. HOST_UNREACHABLE
/// if resolution fails.
Endpoint resolve(const std::string& host, std::uint16_t port);
Endpoint with_port(Endpoint endpoint, std::uint16_t port);

enum class ConnectStatus { Connected, Refused, TimedOut, Unreachable, Failed };

struct ConnectResult {
  ConnectStatus status = ConnectStatus::Failed;
  Socket socket;
  int error = 0;
};

/// Non-blocking connect bounded by `timeout`; the returned socket is back in
/// blocking mode.
ConnectResult connect_with_timeout(const Endpoint& endpoint, Millis timeout);

/// Connects or throws CONNECTION_REFUSED / HOST_UNREACHABLE.
Socket connect_or_throw(const std::string& host, std::uint16_t port, Millis timeout);

void set_io_timeout(int fd, Millis timeout);

bool send_all(int fd, std::string_view data);

enum class ReadStatus { Data, TimedOut, Closed };

/// Waits up to `timeout` for readable bytes and appends what arrives
/// (at most `max_bytes`).
ReadStatus read_some(int fd, std::string& buffer, std::size_t max_bytes, Millis timeout);

/// Reads until `done(buffer)` holds, the peer closes, `limit` bytes are
/// buffered, or `deadline` passes.
template <typename Done>
ReadStatus read_until(int fd, std::string& buffer, std::size_t limit,
                      std::chrono::steady_clock::time_point deadline, Done done) {
  while (!done(buffer) && buffer.size() < limit) {
    auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return ReadStatus::TimedOut;
    ReadStatus s = read_some(fd, buffer, limit - buffer.size(), left);
    if (s != ReadStatus::Data) return s;
  }
  return ReadStatus::Data;
}

/// Removes telnet IAC negotiation sequences; answers DO/WILL with WONT/DONT
/// on `fd` when it is valid.
std::string strip_telnet_negotiation(std::string_view raw, int fd);

std::string lowercase(std::string_view text);

}  // namespace iotsam::probes::detail
