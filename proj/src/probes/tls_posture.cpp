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

#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <csignal>
#include <ctime>
#include <mutex>
#include <memory>

#include "iotsam/error.hpp"
#include "iotsam/probes/probes.hpp"
#include "socket.hpp"

namespace iotsam::probes {

namespace {

struct SslCtxFree {
  void operator()(SSL_CTX* p) const { SSL_CTX_free(p); }
};
struct SslFree {
  void operator()(SSL* p) const { SSL_free(p); }
};
struct X509Free {
  void operator()(X509* p) const { X509_free(p); }
};
using CtxPtr = std::unique_ptr<SSL_CTX, SslCtxFree>;
using SslPtr = std::unique_ptr<SSL, SslFree>;
using CertPtr = std::unique_ptr<X509, X509Free>;

int openssl_version(harness::TlsVersion v) {
  switch (v) {
    case harness::TlsVersion::Tls10: return TLS1_VERSION;
    case harness::TlsVersion::Tls11: return TLS1_1_VERSION;
    case harness::TlsVersion::Tls12: return TLS1_2_VERSION;
    case harness::TlsVersion::Tls13: return TLS1_3_VERSION;
  }
  return TLS1_2_VERSION;
}

bool is_ip_literal(const std::string& host) {
  return host.find_first_not_of("0123456789.") == std::string::npos ||
         host.find(':') != std::string::npos;
}

// Returns the peer certificate on a completed handshake, nullptr-holding
// pointer plus false when the handshake fails.
std::pair<bool, CertPtr> try_handshake(const ProbeTarget& target, harness::TlsVersion version) {
  CtxPtr ctx(SSL_CTX_new(TLS_client_method()));
  if (!ctx) throw Error(ErrorCode::Io, "cannot create TLS context");
  SSL_CTX_set_security_level(ctx.get(), 0);
  SSL_CTX_set_cipher_list(ctx.get(), "ALL:@SECLEVEL=0");
  SSL_CTX_set_min_proto_version(ctx.get(), openssl_version(version));
  SSL_CTX_set_max_proto_version(ctx.get(), openssl_version(version));
  SSL_CTX_set_verify(ctx.get(), SSL_VERIFY_NONE, nullptr);

  detail::Socket sock = detail::connect_or_throw(target.host, target.port, target.connect_timeout);
  detail::set_io_timeout(sock.fd(), std::max(target.connect_timeout, Millis{1000}));

  SslPtr ssl(SSL_new(ctx.get()));
  SSL_set_fd(ssl.get(), sock.fd());
  if (!is_ip_literal(target.host)) SSL_set_tlsext_host_name(ssl.get(), target.host.c_str());
  const bool ok = SSL_connect(ssl.get()) == 1;
  ERR_clear_error();
  CertPtr cert;
  if (ok) {
    cert.reset(SSL_get1_peer_certificate(ssl.get()));
    SSL_shutdown(ssl.get());
  }
  return {ok, std::move(cert)};
}

std::optional<Timestamp> not_after(X509* cert) {
  std::tm tm{};
  if (ASN1_TIME_to_tm(X509_get0_notAfter(cert), &tm) != 1) return std::nullopt;
  return std::chrono::time_point_cast<std::chrono::microseconds>(
      std::chrono::system_clock::from_time_t(::timegm(&tm)));
}

bool self_signed(X509* cert) {
  if (X509_check_issued(cert, cert) != X509_V_OK) return false;
  EVP_PKEY* key = X509_get0_pubkey(cert);
  const bool verified = key != nullptr && X509_verify(cert, key) == 1;
  ERR_clear_error();
  return verified;
}

}  // namespace

harness::TlsPosture tls_posture_check(const ProbeTarget& target) {
  target.validate();
  // OpenSSL writes with write(2); a peer hanging up mid-handshake must not
  // kill the process.
  static std::once_flag sigpipe;
  std::call_once(sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });
  harness::TlsPosture posture;
  posture.host = target.host;
  posture.port = target.port;
  CertPtr first_cert;
  for (auto version : model::all_values<harness::TlsVersion>()) {
    auto [ok, cert] = try_handshake(target, version);
    if (!ok) continue;
    posture.versions.push_back(version);
    if (!first_cert && cert) first_cert = std::move(cert);
  }
  if (posture.versions.empty()) {
    throw Error(ErrorCode::NotTls, "no TLS handshake succeeded with " + target.host + ":" +
                                       std::to_string(target.port));
  }
  if (first_cert) {
    posture.self_signed = self_signed(first_cert.get());
    posture.certificate_expiry = not_after(first_cert.get());
  }
  return posture;
}

}  // namespace iotsam::probes
