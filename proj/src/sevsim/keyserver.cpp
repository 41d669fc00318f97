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

#include "sevsim/keyserver.hpp"

#include <mutex>
#include <string>

namespace sevsim::keyserver {

using certs::KeyRole;
using firmware::FirmwareKind;

bool RevocationSet::is_revoked(FirmwareKind kind, std::uint32_t version) const {
  const auto& set = kind == FirmwareKind::kPspOs ? revoked_psp_os_versions : revoked_sev_fw_versions;
  return set.count(version) != 0;
}

KeyServer::KeyServer(std::uint64_t seed) {
  crypto::EntropySource entropy(seed, "amd-key-server");
  ark_key_ = crypto::SigningKeyPair::from_seed(entropy.next_key());
  ask_key_ = crypto::SigningKeyPair::from_seed(entropy.next_key());
  ark_cert_ = certs::issue(Certificate::make(KeyRole::kArk, ark_key_.public_part), KeyRole::kArk,
                           ark_key_);
  ask_cert_ = certs::issue(Certificate::make(KeyRole::kAsk, ask_key_.public_part), KeyRole::kArk,
                           ark_key_);
}

PlatformId KeyServer::register_platform(const Key32& s_otp) {
  PlatformId id = certs::derive_platform_id(s_otp);
  std::unique_lock lock(mu_);
  platforms_.emplace(id, s_otp);
  return id;
}

std::pair<Certificate, Certificate> KeyServer::get_root_certs() const {
  return {ark_cert_, ask_cert_};
}

Key32 KeyServer::escrowed_secret(const PlatformId& id) const {
  std::shared_lock lock(mu_);
  auto it = platforms_.find(id);
  if (it == platforms_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown platform id " + to_hex(id));
  }
  return it->second;
}

Certificate KeyServer::issue_cek(const Key32& cek_seed,
                                 std::optional<certs::VersionInfo> versions) const {
  auto cek = crypto::SigningKeyPair::from_seed(cek_seed);
  return certs::issue(Certificate::make(KeyRole::kCek, cek.public_part, versions), KeyRole::kAsk,
                      ask_key_);
}

Certificate KeyServer::get_cek_certificate_baseline(const PlatformId& id) const {
  Key32 s_otp = escrowed_secret(id);
  return issue_cek(crypto::kdf("CEK", {s_otp}), std::nullopt);
}

Certificate KeyServer::get_cek_certificate_enhanced(const PlatformId& id, std::uint32_t pv,
                                                    std::uint32_t sv) const {
  Key32 s_otp = escrowed_secret(id);
  {
    std::shared_lock lock(mu_);
    if (revoked_.is_revoked(FirmwareKind::kPspOs, pv)) {
      throw Error(ErrorCode::kRevoked, "PSP OS version " + std::to_string(pv) + " is revoked");
    }
    if (revoked_.is_revoked(FirmwareKind::kSevFw, sv)) {
      throw Error(ErrorCode::kRevoked, "SEV firmware version " + std::to_string(sv) + " is revoked");
    }
  }
  Bytes pv_bytes = crypto::encode_u32(pv);
  Bytes sv_bytes = crypto::encode_u32(sv);
  Key32 s_psp = crypto::kdf("S_PSP", {pv_bytes, s_otp});
  Key32 s_cek = crypto::kdf("S_CEK", {sv_bytes, s_psp});
  return issue_cek(crypto::kdf("CEK", {s_cek}), certs::VersionInfo{pv, sv});
}

void KeyServer::revoke_firmware(FirmwareKind kind, std::uint32_t version) {
  std::unique_lock lock(mu_);
  if (kind == FirmwareKind::kPspOs) {
    revoked_.revoked_psp_os_versions.insert(version);
  } else {
    revoked_.revoked_sev_fw_versions.insert(version);
  }
}

RevocationSet KeyServer::revocations() const {
  std::shared_lock lock(mu_);
  return revoked_;
}

firmware::FirmwareImage KeyServer::release_firmware(FirmwareKind kind, std::uint32_t version,
                                                    firmware::Behavior behavior,
                                                    ByteView body) const {
  return firmware::sign_image(firmware::make_image(kind, version, behavior, body), ark_key_);
}

Certificate LocalKeyServerClient::cek_certificate(const PlatformId& id,
                                                  std::optional<certs::VersionInfo> versions) {
  if (!versions) return server_.get_cek_certificate_baseline(id);
  return server_.get_cek_certificate_enhanced(id, versions->psp_os_version,
                                              versions->sev_fw_version);
}

}  // namespace sevsim::keyserver
