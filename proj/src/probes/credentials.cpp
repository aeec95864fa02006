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

#include <openssl/evp.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "iotsam/error.hpp"
#include "iotsam/probes/probes.hpp"
#include "socket.hpp"

#ifndef IOTSAM_DEFAULT_DATA_DIR
#define IOTSAM_DEFAULT_DATA_DIR "data"
#endif

namespace iotsam::probes {

namespace {

using SteadyClock = std::chrono::steady_clock;

bool contains_any(std::string_view haystack, std::span<const std::string_view> needles) {
  for (auto n : needles) {
    if (haystack.find(n) != std::string_view::npos) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string base64(std::string_view raw) {
  std::string out(4 * ((raw.size() + 2) / 3) + 1, '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(raw.data()),
                          static_cast<int>(raw.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

// Reads (telnet-decoded, lower-cased view kept alongside) until one of the
// markers shows up in the tail or the deadline passes.
struct TelnetReader {
  int fd;
  std::string raw;
  std::string text;

  bool wait_for(std::span<const std::string_view> markers, Millis timeout,
                std::size_t from = 0) {
    const auto deadline = SteadyClock::now() + timeout;
    for (;;) {
      if (contains_any(detail::lowercase(std::string_view(text).substr(std::min(from, text.size()))),
                       markers)) {
        return true;
      }
      auto left = std::chrono::duration_cast<Millis>(deadline - SteadyClock::now());
      if (left.count() <= 0) return false;
      std::string chunk;
      if (detail::read_some(fd, chunk, 4096, left) != detail::ReadStatus::Data) return false;
      text += detail::strip_telnet_negotiation(chunk, fd);
    }
  }

  // Collects whatever arrives until the line goes quiet.
  void drain(Millis timeout, Millis idle) {
    const auto deadline = SteadyClock::now() + timeout;
    bool got = false;
    for (;;) {
      auto left = std::chrono::duration_cast<Millis>(deadline - SteadyClock::now());
      if (left.count() <= 0) return;
      std::string chunk;
      if (detail::read_some(fd, chunk, 4096, got ? std::min(left, idle) : left) !=
          detail::ReadStatus::Data) {
        return;
      }
      got = true;
      text += detail::strip_telnet_negotiation(chunk, fd);
    }
  }
};

constexpr Millis kPromptNudgeAfter{300};
constexpr std::array<std::string_view, 2> kLoginPrompts{"login:", "username:"};
constexpr std::array<std::string_view, 1> kPasswordPrompts{"password:"};
constexpr std::array<std::string_view, 1> kWelcome{"welcome"};
constexpr std::array<std::string_view, 7> kRejections{
    "incorrect", "failed", "denied", "invalid", "login:", "username:", "bad password"};

enum class AttemptResult { Accepted, Rejected, Mismatch };

AttemptResult telnet_attempt(const ProbeTarget& target, const harness::Credential& cred,
                             const CredentialOptions& options) {
  detail::Socket sock = detail::connect_or_throw(target.host, target.port, target.connect_timeout);
  TelnetReader reader{sock.fd(), {}, {}};
  if (!reader.wait_for(kLoginPrompts, std::min(options.read_timeout, kPromptNudgeAfter))) {
    // Some daemons print only a banner until they see a keystroke.
    detail::send_all(sock.fd(), "\r\n");
    if (!reader.wait_for(kLoginPrompts, options.read_timeout)) return AttemptResult::Mismatch;
  }

  if (!detail::send_all(sock.fd(), cred.username + "\r\n")) return AttemptResult::Rejected;
  std::size_t mark = reader.text.size();
  if (!reader.wait_for(kPasswordPrompts, options.read_timeout, mark)) {
    // Some devices log in without a password prompt; anything else is a refusal.
    reader.drain(options.read_timeout, Millis{200});
    auto reply = detail::lowercase(std::string_view(reader.text).substr(mark));
    return contains_any(reply, kRejections) || reply.find_first_of("#$>") == std::string::npos
               ? AttemptResult::Rejected
               : AttemptResult::Accepted;
  }
  if (!detail::send_all(sock.fd(), cred.password + "\r\n")) return AttemptResult::Rejected;
  mark = reader.text.size();
  reader.drain(options.read_timeout, Millis{250});
  auto reply = detail::lowercase(std::string_view(reader.text).substr(mark));
  if (contains_any(reply, kRejections)) return AttemptResult::Rejected;
  return reply.find_first_of("#$>") != std::string::npos || contains_any(reply, kWelcome)
             ? AttemptResult::Accepted
             : AttemptResult::Rejected;
}

// Sends a GET and returns the HTTP status, or -1 when the reply is not HTTP.
int http_status(const ProbeTarget& target, const CredentialOptions& options,
                const std::string& authorization) {
  detail::Socket sock = detail::connect_or_throw(target.host, target.port, target.connect_timeout);
  std::string request = "GET " + options.http_path + " HTTP/1.1\r\nHost: " + target.host +
                        "\r\nUser-Agent: iotsam\r\nConnection: close\r\n";
  if (!authorization.empty()) request += "Authorization: Basic " + authorization + "\r\n";
  request += "\r\n";
  detail::send_all(sock.fd(), request);
  std::string reply;
  detail::read_until(sock.fd(), reply, 4096, SteadyClock::now() + options.read_timeout,
                     [](const std::string& b) { return b.find("\r\n") != std::string::npos; });
  if (reply.rfind("HTTP/1.", 0) != 0 || reply.size() < 12) return -1;
  return std::atoi(reply.c_str() + 9);
}

}  // namespace

CredentialService credential_service_from_token(std::string_view token) {
  if (token == "telnet") return CredentialService::Telnet;
  if (token == "http-basic") return CredentialService::HttpBasic;
  throw Error(ErrorCode::Precondition, "unsupported credential service '" + std::string(token) + "'");
}

std::string_view credential_service_token(CredentialService service) {
  return service == CredentialService::Telnet ? "telnet" : "http-basic";
}

harness::CredentialResultPayload default_credential_check(
    const ProbeTarget& target, CredentialService service,
    std::span<const harness::Credential> credentials, const CredentialOptions& options,
    std::stop_token stop) {
  target.validate();
  if (credentials.empty()) throw Error(ErrorCode::Precondition, "credential list is empty");

  harness::CredentialResultPayload out;
  out.host = target.host;
  out.port = target.port;
  out.service_kind = std::string(credential_service_token(service));

  const std::string where = target.host + ":" + std::to_string(target.port);
  if (service == CredentialService::HttpBasic) {
    int status = http_status(target, options, {});
    if (status < 0) {
      throw Error(ErrorCode::ServiceMismatch, where + " does not answer HTTP");
    }
    if (status != 401) return out;  // no Basic challenge, nothing to guess
  }

  std::optional<SteadyClock::time_point> last_start;
  for (const auto& cred : credentials) {
    if (stop.stop_requested()) break;
    if (last_start) {
      const auto due = *last_start + options.min_attempt_interval;
      while (SteadyClock::now() < due && !stop.stop_requested()) {
        std::this_thread::sleep_for(std::min<SteadyClock::duration>(due - SteadyClock::now(), Millis{50}));
      }
      if (stop.stop_requested()) break;
    }
    last_start = SteadyClock::now();
    ++out.attempted;

    bool accepted = false;
    if (service == CredentialService::Telnet) {
      auto result = telnet_attempt(target, cred, options);
      if (result == AttemptResult::Mismatch) {
        if (out.attempted == 1) throw Error(ErrorCode::ServiceMismatch, where + " shows no telnet login prompt");
        continue;  // likely rate limiting after earlier attempts
      }
      accepted = result == AttemptResult::Accepted;
    } else {
      int status = http_status(target, options, base64(cred.username + ":" + cred.password));
      accepted = status >= 200 && status < 400;
    }
    if (accepted) out.accepted.push_back(cred);
  }
  return out;
}

std::vector<harness::Credential> parse_credential_list(std::string_view text) {
  std::vector<harness::Credential> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto colon = t.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw Error(ErrorCode::Syntax, "credential line " + std::to_string(number) +
                                         " is not 'user:password'");
    }
    out.push_back({t.substr(0, colon), t.substr(colon + 1)});
  }
  return out;
}

std::vector<harness::Credential> load_credential_list(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read credential list " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_credential_list(buf.str());
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("IOTSAM_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return IOTSAM_DEFAULT_DATA_DIR;
}

std::filesystem::path resolve_credential_list(std::string_view name) {
  if (name.empty() || name == "default") return data_directory() / "default-credentials.txt";
  return std::filesystem::path(name);
}

}  // namespace iotsam::probes
