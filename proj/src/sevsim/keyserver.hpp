// Copyright 2026 The sevsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Mock AMD key distribution server.
//
// The server escrows each chip's s_otp and computes CEKs on demand:
//
//   baseline:  cek_seed = kdf("CEK", [s_otp])
//   enhanced:  s_psp    = kdf("S_PSP", [u32(pv), s_otp])
//              s_cek    = kdf("S_CEK", [u32(sv), s_psp])
//              cek_seed = kdf("CEK",   [s_cek])
//
// The CEK signing key pair is Ed25519 from `cek_seed`, so a platform deriving
// the same seed ends up with the same key without any shared state.

#ifndef SEVSIM_KEYSERVER_HPP_
#define SEVSIM_KEYSERVER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <utility>

#include "sevsim/certs.hpp"
#include "sevsim/core.hpp"
#include "sevsim/crypto.hpp"
#include "sevsim/firmware.hpp"

namespace sevsim::keyserver {

using certs::Certificate;
using certs::PlatformId;

struct RevocationSet {
  std::set<std::uint32_t> revoked_psp_os_versions;
  std::set<std::uint32_t> revoked_sev_fw_versions;

  bool is_revoked(firmware::FirmwareKind kind, std::uint32_t version) const;
};

class KeyServer {
 public:
  // ARK and ASK key pairs are derived from `seed`.
  explicit KeyServer(std::uint64_t seed);

  KeyServer(const KeyServer&) = delete;
  KeyServer& operator=(const KeyServer&) = delete;

  // Idempotent: registering the same secret twice returns the same id.
  PlatformId register_platform(const Key32& s_otp);

  std::pair<Certificate, Certificate> get_root_certs() const;

  // Throws kNotFound for an unregistered platform.
  Certificate get_cek_certificate_baseline(const PlatformId& id) const;

  // Throws kNotFound or kRevoked.
  Certificate get_cek_certificate_enhanced(const PlatformId& id, std::uint32_t pv,
                                           std::uint32_t sv) const;

  void revoke_firmware(firmware::FirmwareKind kind, std::uint32_t version);
  RevocationSet revocations() const;

  // AMD's firmware signing service: signs an image header with the ARK.
  firmware::FirmwareImage release_firmware(firmware::FirmwareKind kind, std::uint32_t version,
                                           firmware::Behavior behavior, ByteView body) const;

  const Bytes& ark_public() const { return ark_key_.public_part; }

 private:
  Certificate issue_cek(const Key32& cek_seed, std::optional<certs::VersionInfo> versions) const;
  Key32 escrowed_secret(const PlatformId& id) const;

  crypto::SigningKeyPair ark_key_;
  crypto::SigningKeyPair ask_key_;
  Certificate ark_cert_;
  Certificate ask_cert_;

  mutable std::shared_mutex mu_;
  std::map<PlatformId, Key32> platforms_;
  RevocationSet revoked_;
};

// How owners, hypervisors and attackers reach the key server: in-process or
// over the HTTP facade. Errors surface as sevsim::Error (kNotFound/kRevoked).
class KeyServerClient {
 public:
  virtual ~KeyServerClient() = default;

  virtual std::pair<Certificate, Certificate> root_certs() = 0;
  // `versions` absent = baseline query.
  virtual Certificate cek_certificate(const PlatformId& id,
                                      std::optional<certs::VersionInfo> versions) = 0;
};

class LocalKeyServerClient final : public KeyServerClient {
 public:
  explicit LocalKeyServerClient(const KeyServer& server) : server_(server) {}

  std::pair<Certificate, Certificate> root_certs() override { return server_.get_root_certs(); }
  Certificate cek_certificate(const PlatformId& id,
                              std::optional<certs::VersionInfo> versions) override;

 private:
  const KeyServer& server_;
};

}  // namespace sevsim::keyserver

#endif  // SEVSIM_KEYSERVER_HPP_
