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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/ssl.h>
#include <openssl/x509v3.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "iotsam/mock/mock_device.hpp"

namespace iotsam::mock {

namespace {

using namespace std::chrono_literals;
using SteadyClock = std::chrono::steady_clock;

constexpr auto kPollSlice = 100ms;
constexpr auto kIdleLimit = 10s;

struct KeyFree {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct CertFree {
  void operator()(X509* p) const { X509_free(p); }
};
struct CtxFree {
  void operator()(SSL_CTX* p) const { SSL_CTX_free(p); }
};
struct SslFree {
  void operator()(SSL* p) const { SSL_free(p); }
};
using KeyPtr = std::unique_ptr<EVP_PKEY, KeyFree>;
using CertPtr = std::unique_ptr<X509, CertFree>;
using CtxPtr = std::unique_ptr<SSL_CTX, CtxFree>;
using SslPtr = std::unique_ptr<SSL, SslFree>;

[[noreturn]] void tls_failure(const std::string& what) {
  ERR_clear_error();
  throw Error(ErrorCode::Io, "mock TLS setup failed: " + what);
}

KeyPtr make_key() {
  KeyPtr key(EVP_EC_gen("P-256"));
  if (!key) tls_failure("key generation");
  return key;
}

CertPtr make_certificate(EVP_PKEY* key, const char* common_name, X509* issuer,
                         EVP_PKEY* issuer_key, bool authority, long serial) {
  CertPtr cert(X509_new());
  X509_set_version(cert.get(), 2);
  ASN1_INTEGER_set(X509_get_serialNumber(cert.get()), serial);
  X509_gmtime_adj(X509_getm_notBefore(cert.get()), -3600);
  X509_gmtime_adj(X509_getm_notAfter(cert.get()), 365L * 24 * 3600);
  X509_set_pubkey(cert.get(), key);
  X509_NAME* name = X509_get_subject_name(cert.get());
  X509_NAME_add_entry_by_txt(name, "O", MBSTRING_ASC,
                             reinterpret_cast<const unsigned char*>("iotsam fixture"), -1, -1, 0);
  X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_ASC,
                             reinterpret_cast<const unsigned char*>(common_name), -1, -1, 0);
  X509_set_issuer_name(cert.get(), issuer != nullptr ? X509_get_subject_name(issuer) : name);

  X509V3_CTX ctx;
  X509V3_set_ctx_nodb(&ctx);
  X509V3_set_ctx(&ctx, issuer != nullptr ? issuer : cert.get(), cert.get(), nullptr, nullptr, 0);
  X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, NID_basic_constraints,
                                            authority ? "critical,CA:TRUE" : "CA:FALSE");
  if (ext != nullptr) {
    X509_add_ext(cert.get(), ext, -1);
    X509_EXTENSION_free(ext);
  }
  if (X509_sign(cert.get(), issuer_key != nullptr ? issuer_key : key, EVP_sha256()) == 0) {
    tls_failure("certificate signing");
  }
  return cert;
}

int openssl_version(harness::TlsVersion v) {
  switch (v) {
    case harness::TlsVersion::Tls10: return TLS1_VERSION;
    case harness::TlsVersion::Tls11: return TLS1_1_VERSION;
    case harness::TlsVersion::Tls12: return TLS1_2_VERSION;
    case harness::TlsVersion::Tls13: return TLS1_3_VERSION;
  }
  return TLS1_2_VERSION;
}

CtxPtr make_server_context(const MockService& service) {
  KeyPtr leaf_key = make_key();
  CertPtr leaf;
  if (service.certificate == CertificateKind::CaSigned) {
    KeyPtr ca_key = make_key();
    CertPtr ca = make_certificate(ca_key.get(), "iotsam fixture CA", nullptr, nullptr, true, 1);
    leaf = make_certificate(leaf_key.get(), "iotsam mock device", ca.get(), ca_key.get(), false, 2);
  } else {
    leaf = make_certificate(leaf_key.get(), "iotsam mock device", nullptr, nullptr, false, 1);
  }
  CtxPtr ctx(SSL_CTX_new(TLS_server_method()));
  if (!ctx) tls_failure("context");
  SSL_CTX_set_security_level(ctx.get(), 0);
  SSL_CTX_set_cipher_list(ctx.get(), "ALL:@SECLEVEL=0");
  SSL_CTX_set_min_proto_version(ctx.get(), openssl_version(service.tls_versions.front()));
  SSL_CTX_set_max_proto_version(ctx.get(), openssl_version(service.tls_versions.back()));
  if (SSL_CTX_use_certificate(ctx.get(), leaf.get()) != 1 ||
      SSL_CTX_use_PrivateKey(ctx.get(), leaf_key.get()) != 1) {
    tls_failure("certificate install");
  }
  return ctx;
}

void set_timeouts(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

void send_text(int fd, std::string_view text) {
  while (!text.empty()) {
    ssize_t n = ::send(fd, text.data(), text.size(), MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return;
    }
    text.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Buffered plain-socket reader that gives up when the device stops.
class Connection {
 public:
  Connection(int fd, std::stop_token stop) : fd_(fd), stop_(std::move(stop)) {}

  int fd() const { return fd_; }

  // Appends to the buffer; false on close, stop or idle timeout.
  bool fill(std::chrono::milliseconds limit) {
    const auto deadline = SteadyClock::now() + limit;
    while (!stop_.stop_requested()) {
      if (SteadyClock::now() >= deadline) return false;
      pollfd pfd{fd_, POLLIN, 0};
      int ready = ::poll(&pfd, 1, static_cast<int>(kPollSlice.count()));
      if (ready < 0 && errno != EINTR) return false;
      if (ready <= 0) continue;
      char chunk[512];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
      return true;
    }
    return false;
  }

  // One input line with CR and telnet command bytes removed.
  std::optional<std::string> line(std::chrono::milliseconds limit = kIdleLimit) {
    for (;;) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string raw = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        std::string out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
          auto c = static_cast<unsigned char>(raw[i]);
          if (c == 255) {
            i += (i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) >= 251) ? 2 : 1;
          } else if (c != '\r' && c != 0) {
            out.push_back(raw[i]);
          }
        }
        return out;
      }
      if (!fill(limit)) return std::nullopt;
    }
  }

  std::optional<std::string> until(std::string_view marker, std::chrono::milliseconds limit) {
    for (;;) {
      auto at = buffer_.find(marker);
      if (at != std::string::npos) {
        std::string out = buffer_.substr(0, at + marker.size());
        buffer_.erase(0, at + marker.size());
        return out;
      }
      if (buffer_.size() > 16384 || !fill(limit)) return std::nullopt;
    }
  }

  const std::string& buffered() const { return buffer_; }

 private:
  int fd_;
  std::stop_token stop_;
  std::string buffer_;
};

std::string basic_token(const harness::Credential& c) {
  const std::string raw = c.username + ":" + c.password;
  std::string out(4 * ((raw.size() + 2) / 3) + 1, '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(raw.data()), static_cast<int>(raw.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string lowercase(std::string text) {
  for (auto& c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return text;
}

void serve_telnet(Connection& conn, const MockService& service) {
  if (!service.banner.empty()) send_text(conn.fd(), service.banner + "\r\n");
  if (!conn.line()) return;  // prompt appears after the first keystroke
  for (int attempt = 0; attempt < 3; ++attempt) {
    send_text(conn.fd(), "login: ");
    auto user = conn.line();
    if (!user) return;
    send_text(conn.fd(), "Password: ");
    auto pass = conn.line();
    if (!pass) return;
    bool ok = std::any_of(service.credentials.begin(), service.credentials.end(),
                          [&](const harness::Credential& c) { return c.username == *user && c.password == *pass; });
    if (!ok) {
      send_text(conn.fd(), "\r\nLogin incorrect\r\n");
      continue;
    }
    send_text(conn.fd(), "\r\nBusyBox built-in shell\r\n# ");
    while (auto cmd = conn.line()) {
      if (*cmd == "exit") return;
      send_text(conn.fd(), "# ");
    }
    return;
  }
}

std::string http_response(int status, std::string_view reason, const std::string& extra_headers,
                          std::string_view body) {
  return "HTTP/1.1 " + std::to_string(status) + " " + std::string(reason) + "\r\n" + extra_headers +
         "Content-Length: " + std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n" +
         std::string(body);
}

std::string answer_http(const std::string& request, const MockService& service) {
  if (service.credentials.empty()) return http_response(200, "OK", "", "ok\n");
  const std::string lower = lowercase(request);
  const std::string key = "\r\nauthorization: basic ";
  auto at = lower.find(key);
  if (at != std::string::npos) {
    auto begin = at + key.size();
    auto end = request.find("\r\n", begin);
    std::string token = request.substr(begin, end - begin);
    for (const auto& c : service.credentials) {
      if (basic_token(c) == token) return http_response(200, "OK", "", "ok\n");
    }
  }
  return http_response(401, "Unauthorized", "WWW-Authenticate: Basic realm=\"device\"\r\n", "");
}

void serve_http(Connection& conn, const MockService& service) {
  if (!conn.fill(kIdleLimit)) return;
  const char first = conn.buffered().front();
  if (first < 'A' || first > 'Z') {
    send_text(conn.fd(), http_response(400, "Bad Request", "", ""));
    return;
  }
  auto request = conn.until("\r\n\r\n", 2s);
  if (!request) {
    send_text(conn.fd(), http_response(400, "Bad Request", "", ""));
    return;
  }
  send_text(conn.fd(), answer_http(*request, service));
}

void serve_tls(int fd, SSL_CTX* ctx) {
  set_timeouts(fd, 2s);
  SslPtr ssl(SSL_new(ctx));
  SSL_set_fd(ssl.get(), fd);
  if (SSL_accept(ssl.get()) == 1) {
    char buf[2048];
    std::string request;
    while (request.find("\r\n\r\n") == std::string::npos && request.size() < 16384) {
      int n = SSL_read(ssl.get(), buf, sizeof buf);
      if (n <= 0) break;
      request.append(buf, static_cast<std::size_t>(n));
    }
    if (!request.empty()) {
      const std::string reply = http_response(200, "OK", "", "ok\n");
      SSL_write(ssl.get(), reply.data(), static_cast<int>(reply.size()));
    }
    SSL_shutdown(ssl.get());
  }
  ERR_clear_error();
}

void serve_silent(Connection& conn) {
  while (conn.fill(kIdleLimit)) {
  }
}

}  // namespace

struct MockDevice::Impl {
  MockDeviceConfig config;
  struct Listener {
    int fd = -1;
    const MockService* service = nullptr;
    CtxPtr tls;
  };
  std::vector<Listener> listeners;
  std::stop_source stop;
  std::vector<std::jthread> acceptors;
  std::mutex mutex;
  struct Handler {
    std::shared_ptr<std::atomic<bool>> done = std::make_shared<std::atomic<bool>>(false);
    std::jthread thread;
  };
  std::list<Handler> handlers;
  std::set<int> open_fds;
  std::atomic<std::size_t> accepted{0};

  void handle(int fd, const Listener& listener, std::stop_token token) {
    Connection conn(fd, token);
    switch (listener.service->protocol) {
      case ServiceProtocol::Telnet: serve_telnet(conn, *listener.service); break;
      case ServiceProtocol::Http: serve_http(conn, *listener.service); break;
      case ServiceProtocol::Tls: serve_tls(fd, listener.tls.get()); break;
      case ServiceProtocol::Silent: serve_silent(conn); break;
    }
    std::lock_guard lock(mutex);
    open_fds.erase(fd);
    ::close(fd);
  }

  void accept_loop(const Listener& listener, std::stop_token token) {
    while (!token.stop_requested()) {
      pollfd pfd{listener.fd, POLLIN, 0};
      int ready = ::poll(&pfd, 1, static_cast<int>(kPollSlice.count()));
      if (ready <= 0) continue;
      int fd = ::accept4(listener.fd, nullptr, nullptr, SOCK_CLOEXEC);
      if (fd < 0) continue;
      ++accepted;
      std::lock_guard lock(mutex);
      if (token.stop_requested()) {
        ::close(fd);
        return;
      }
      open_fds.insert(fd);
      reap_finished_locked();
      auto& h = handlers.emplace_back();
      h.thread = std::jthread([this, fd, &listener, done = h.done](std::stop_token t) {
        handle(fd, listener, t);
        *done = true;
      });
    }
  }

  // Keeps the handler list from growing without bound on long runs.
  void reap_finished_locked() {
    std::erase_if(handlers, [](const Handler& h) { return h.done->load(); });
  }

  void bind_all() {
    for (const auto& service : config.services) {
      Listener l;
      l.service = &service;
      if (service.protocol == ServiceProtocol::Tls) l.tls = make_server_context(service);
      l.fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
      int one = 1;
      ::setsockopt(l.fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      sockaddr_in addr{};
      addr.sin_family = AF_INET;
      addr.sin_port = htons(service.port);
      ::inet_pton(AF_INET, config.address.c_str(), &addr.sin_addr);
      if (::bind(l.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(l.fd, 128) != 0) {
        const std::string reason = std::strerror(errno);
        ::close(l.fd);
        throw Error(ErrorCode::Io, "cannot listen on " + config.address + ":" +
                                       std::to_string(service.port) + ": " + reason);
      }
      listeners.push_back(std::move(l));
    }
  }

  void shutdown() {
    stop.request_stop();
    acceptors.clear();
    {
      std::lock_guard lock(mutex);
      for (int fd : open_fds) ::shutdown(fd, SHUT_RDWR);
    }
    std::list<Handler> done;
    {
      std::lock_guard lock(mutex);
      done.swap(handlers);
    }
    done.clear();
    for (auto& l : listeners) {
      if (l.fd >= 0) ::close(l.fd);
    }
    listeners.clear();
  }
};

MockDevice::MockDevice(MockDeviceConfig config) : impl_(std::make_unique<Impl>()) {
  std::signal(SIGPIPE, SIG_IGN);  // TLS peers hang up mid-write
  impl_->config = std::move(config);
  impl_->listeners.reserve(impl_->config.services.size());
  try {
    impl_->bind_all();
  } catch (...) {
    impl_->shutdown();
    throw;
  }
  for (const auto& l : impl_->listeners) {
    impl_->acceptors.emplace_back([this, &l] { impl_->accept_loop(l, impl_->stop.get_token()); });
  }
}

MockDevice::~MockDevice() { impl_->shutdown(); }

const MockDeviceConfig& MockDevice::config() const { return impl_->config; }

std::size_t MockDevice::connections() const { return impl_->accepted.load(); }

}  // namespace iotsam::mock
