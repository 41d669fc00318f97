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

// Certificate model for the two SEV chains:
//
//   identity:  PDH -> PEK -> CEK -> ASK -> ARK   (ARK pinned by the verifier)
//   owner:     PDH -> PEK -> OCA                 (OCA pinned by the verifier)
//
// A PEK may carry two signatures (CEK and OCA); each chain check consults only
// the entry of the issuer it cares about.

#ifndef SEVSIM_CERTS_HPP_
#define SEVSIM_CERTS_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sevsim/core.hpp"
#include "sevsim/crypto.hpp"
#include "sevsim/policy.hpp"

namespace sevsim::certs {

enum class KeyRole : std::uint8_t { kArk = 1, kAsk, kCek, kOca, kPek, kPdh };
enum class KeyUsage : std::uint8_t { kSigning = 1, kKeyExchange = 2 };

std::string_view to_string(KeyRole role);

// True iff `issuer` may sign a certificate whose subject has role `subject`.
bool permitted_issuer(KeyRole subject, KeyRole issuer);

struct VersionInfo {
  std::uint32_t psp_os_version = 0;
  std::uint32_t sev_fw_version = 0;

  auto operator<=>(const VersionInfo&) const = default;
};

struct CertSignature {
  KeyRole issuer_role;
  Bytes issuer_key_id;
  Bytes signature;

  bool operator==(const CertSignature&) const = default;
};

struct Certificate {
  KeyRole subject_role = KeyRole::kPdh;
  Bytes public_key;
  KeyUsage key_usage = KeyUsage::kSigning;
  std::optional<VersionInfo> version_info;
  std::uint64_t serial = 0;
  std::vector<CertSignature> signatures;

  // Unsigned certificate with usage and serial filled in from the role/key.
  static Certificate make(KeyRole role, ByteView public_key,
                          std::optional<VersionInfo> versions = std::nullopt);

  // Canonical bytes covered by every signature (all fields but `signatures`).
  Bytes tbs_bytes() const;
  Bytes serialize() const;
  static Certificate deserialize(ByteView in);

  const CertSignature* signature_by(KeyRole issuer) const;

  bool operator==(const Certificate&) const = default;
};

Bytes key_id(ByteView public_key);

using PlatformId = Key32;

// hash("SEV-PLATFORM-ID" || s_otp): stable for the chip across firmware versions.
PlatformId derive_platform_id(const Key32& s_otp);

// Adds (or replaces) the signature of `issuer_role`. Throws
// kImpermissibleIssuer if the role matrix forbids the pairing.
Certificate issue(Certificate subject, KeyRole issuer_role, const crypto::SigningKeyPair& issuer_key);

// Debug rendering: role, key fingerprint, versions, signers.
std::string render(const Certificate& cert);

struct ChainBundle {
  Certificate pdh;
  Certificate pek;
  Certificate cek;
  Certificate ask;
  Certificate ark;
  std::optional<Certificate> oca;

  Bytes serialize() const;
  static ChainBundle deserialize(ByteView in);

  bool operator==(const ChainBundle&) const = default;
};

enum class ChainFailure : std::uint8_t {
  kNone = 0,
  kRoleMismatch,
  kBadKeyUsage,
  kUntrustedRoot,
  kMissingSignature,
  kBadSignature,
  kMissingVersionInfo,
  kVersionTooLow,
};

std::string_view to_string(ChainFailure failure);

struct ChainVerdict {
  ChainFailure failure = ChainFailure::kNone;
  std::optional<KeyRole> at;  // certificate where verification stopped

  bool ok() const { return failure == ChainFailure::kNone; }
  explicit operator bool() const { return ok(); }
  std::string describe() const;

  static ChainVerdict fail(ChainFailure f, KeyRole role) { return {f, role}; }
};

ChainVerdict verify_identity_chain(const ChainBundle& bundle, const Certificate& trusted_ark);
ChainVerdict verify_owner_chain(const Certificate& pdh, const Certificate& pek,
                                const Certificate& trusted_oca);

// Enhanced-mode check: CEK versions must be >= the policy minimums. A CEK
// without version info fails closed.
ChainVerdict check_version_policy(const Certificate& cek, const GuestPolicy& policy);

}  // namespace sevsim::certs

#endif  // SEVSIM_CERTS_HPP_
