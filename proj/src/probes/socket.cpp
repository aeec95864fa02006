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

#include "socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "iotsam/error.hpp"

namespace iotsam::probes::detail {

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.release();
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

Endpoint resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result);
  if (rc != 0 || result == nullptr) {
    throw Error(ErrorCode::HostUnreachable,
                "cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  Endpoint ep;
  std::memcpy(&ep.address, result->ai_addr, result->ai_addrlen);
  ep.length = result->ai_addrlen;
  ::freeaddrinfo(result);
  return ep;
}

Endpoint with_port(Endpoint endpoint, std::uint16_t port) {
  if (endpoint.address.ss_family == AF_INET) {
    reinterpret_cast<sockaddr_in*>(&endpoint.address)->sin_port = htons(port);
  } else if (endpoint.address.ss_family == AF_INET6) {
    reinterpret_cast<sockaddr_in6*>(&endpoint.address)->sin6_port = htons(port);
  }
  return endpoint;
}

namespace {

ConnectStatus classify(int err) {
  switch (err) {
    case 0: return ConnectStatus::Connected;
    case ECONNREFUSED: return ConnectStatus::Refused;
    case ETIMEDOUT: return ConnectStatus::TimedOut;
    case EHOSTUNREACH:
    case ENETUNREACH:
    case EHOSTDOWN:
    case ENETDOWN: return ConnectStatus::Unreachable;
    default: return ConnectStatus::Failed;
  }
}

}  // namespace

ConnectResult connect_with_timeout(const Endpoint& endpoint, Millis timeout) {
  ConnectResult out;
  Socket sock(::socket(endpoint.address.ss_family, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!sock.valid()) {
    out.error = errno;
    return out;
  }
  int flags = ::fcntl(sock.fd(), F_GETFL, 0);
  ::fcntl(sock.fd(), F_SETFL, flags | O_NONBLOCK);

  int rc = ::connect(sock.fd(), reinterpret_cast<const sockaddr*>(&endpoint.address), endpoint.length);
  int err = 0;
  if (rc != 0) {
    if (errno != EINPROGRESS) {
      out.error = errno;
      out.status = classify(errno);
      return out;
    }
    pollfd pfd{sock.fd(), POLLOUT, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (ready == 0) {
      out.status = ConnectStatus::TimedOut;
      out.error = ETIMEDOUT;
      return out;
    }
    socklen_t len = sizeof err;
    ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
  }
  out.error = err;
  out.status = classify(err);
  if (out.status == ConnectStatus::Connected) {
    ::fcntl(sock.fd(), F_SETFL, flags);
    int one = 1;
    ::setsockopt(sock.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    out.socket = std::move(sock);
  }
  return out;
}

Socket connect_or_throw(const std::string& host, std::uint16_t port, Millis timeout) {
  ConnectResult r = connect_with_timeout(resolve(host, port), timeout);
  const std::string where = host + ":" + std::to_string(port);
  switch (r.status) {
    case ConnectStatus::Connected: return std::move(r.socket);
    case ConnectStatus::Refused:
      throw Error(ErrorCode::ConnectionRefused, "connection refused by " + where);
    case ConnectStatus::TimedOut:
      throw Error(ErrorCode::HostUnreachable, "connect to " + where + " timed out");
    default:
      throw Error(ErrorCode::HostUnreachable,
                  "cannot reach " + where + ": " + std::strerror(r.error));
  }
}

void set_io_timeout(int fd, Millis timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

ReadStatus read_some(int fd, std::string& buffer, std::size_t max_bytes, Millis timeout) {
  pollfd pfd{fd, POLLIN, 0};
  int ready = ::poll(&pfd, 1, static_cast<int>(std::max<std::int64_t>(timeout.count(), 0)));
  if (ready == 0) return ReadStatus::TimedOut;
  if (ready < 0) return errno == EINTR ? ReadStatus::TimedOut : ReadStatus::Closed;
  char chunk[1024];
  ssize_t n = ::recv(fd, chunk, std::min(max_bytes, sizeof chunk), 0);
  if (n <= 0) return ReadStatus::Closed;
  buffer.append(chunk, static_cast<std::size_t>(n));
  return ReadStatus::Data;
}

std::string strip_telnet_negotiation(std::string_view raw, int fd) {
  constexpr unsigned char IAC = 255, DONT = 254, DO = 253, WONT = 252, WILL = 251, SB = 250, SE = 240;
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto c = static_cast<unsigned char>(raw[i]);
    if (c != IAC) {
      out.push_back(raw[i]);
      continue;
    }
    if (i + 1 >= raw.size()) break;
    auto cmd = static_cast<unsigned char>(raw[i + 1]);
    if (cmd == IAC) {
      out.push_back(raw[i + 1]);
      ++i;
    } else if (cmd >= WILL && cmd <= DONT && i + 2 < raw.size()) {
      if (fd >= 0) {
        const char reply[3] = {static_cast<char>(IAC),
                               static_cast<char>(cmd == DO || cmd == DONT ? WONT : DONT), raw[i + 2]};
        send_all(fd, std::string_view(reply, 3));
      }
      i += 2;
    } else if (cmd == SB) {
      std::size_t end = raw.find(static_cast<char>(SE), i);
      i = end == std::string_view::npos ? raw.size() : end;
    } else {
      ++i;
    }
  }
  return out;
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace iotsam::probes::detail
