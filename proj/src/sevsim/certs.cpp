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

#include "sevsim/certs.hpp"

#include <algorithm>
#include <sstream>

namespace sevsim::certs {
namespace {

constexpr std::uint8_t kCertFormat = 1;

KeyRole read_role(ByteReader& r) {
  std::uint8_t v = r.u8();
  if (v < static_cast<std::uint8_t>(KeyRole::kArk) || v > static_cast<std::uint8_t>(KeyRole::kPdh)) {
    throw Error(ErrorCode::kMalformedInput, "unknown key role");
  }
  return static_cast<KeyRole>(v);
}

KeyUsage usage_for(KeyRole role) {
  return role == KeyRole::kPdh ? KeyUsage::kKeyExchange : KeyUsage::kSigning;
}

void write_tbs(ByteWriter& w, const Certificate& c) {
  w.u8(kCertFormat)
      .u8(static_cast<std::uint8_t>(c.subject_role))
      .bytes(c.public_key)
      .u8(static_cast<std::uint8_t>(c.key_usage))
      .boolean(c.version_info.has_value());
  if (c.version_info) w.u32(c.version_info->psp_os_version).u32(c.version_info->sev_fw_version);
  w.u64(c.serial);
}

Certificate read_cert(ByteReader& r) {
  Certificate c;
  if (r.u8() != kCertFormat) throw Error(ErrorCode::kMalformedInput, "unknown certificate format");
  c.subject_role = read_role(r);
  c.public_key = r.bytes();
  std::uint8_t usage = r.u8();
  if (usage != 1 && usage != 2) throw Error(ErrorCode::kMalformedInput, "unknown key usage");
  c.key_usage = static_cast<KeyUsage>(usage);
  if (r.boolean()) {
    VersionInfo v;
    v.psp_os_version = r.u32();
    v.sev_fw_version = r.u32();
    c.version_info = v;
  }
  c.serial = r.u64();
  std::uint32_t n = r.u32();
  if (n > 8) throw Error(ErrorCode::kMalformedInput, "too many signatures");
  for (std::uint32_t i = 0; i < n; ++i) {
    CertSignature s;
    s.issuer_role = read_role(r);
    s.issuer_key_id = r.bytes();
    s.signature = r.bytes();
    c.signatures.push_back(std::move(s));
  }
  return c;
}

// Checks that `subject` carries a valid signature by `issuer`'s key.
ChainVerdict check_link(const Certificate& subject, const Certificate& issuer) {
  const CertSignature* sig = subject.signature_by(issuer.subject_role);
  if (sig == nullptr) return ChainVerdict::fail(ChainFailure::kMissingSignature, subject.subject_role);
  if (sig->issuer_key_id != key_id(issuer.public_key) ||
      !crypto::verify(issuer.public_key, subject.tbs_bytes(), sig->signature)) {
    return ChainVerdict::fail(ChainFailure::kBadSignature, subject.subject_role);
  }
  return {};
}

ChainVerdict check_shape(const Certificate& c, KeyRole expected) {
  if (c.subject_role != expected) return ChainVerdict::fail(ChainFailure::kRoleMismatch, expected);
  if (c.key_usage != usage_for(expected)) return ChainVerdict::fail(ChainFailure::kBadKeyUsage, expected);
  return {};
}

}  // namespace

std::string_view to_string(KeyRole role) {
  switch (role) {
    case KeyRole::kArk: return "ARK";
    case KeyRole::kAsk: return "ASK";
    case KeyRole::kCek: return "CEK";
    case KeyRole::kOca: return "OCA";
    case KeyRole::kPek: return "PEK";
    case KeyRole::kPdh: return "PDH";
  }
  return "?";
}

bool permitted_issuer(KeyRole subject, KeyRole issuer) {
  switch (subject) {
    case KeyRole::kPdh: return issuer == KeyRole::kPek;
    case KeyRole::kPek: return issuer == KeyRole::kCek || issuer == KeyRole::kOca;
    case KeyRole::kCek: return issuer == KeyRole::kAsk;
    case KeyRole::kAsk: return issuer == KeyRole::kArk;
    case KeyRole::kArk: return issuer == KeyRole::kArk;
    case KeyRole::kOca: return issuer == KeyRole::kOca;
  }
  return false;
}

Bytes key_id(ByteView public_key) {
  Key32 id = crypto::kdf("SEV-KEY-ID", {public_key});
  return Bytes(id.begin(), id.begin() + 16);
}

PlatformId derive_platform_id(const Key32& s_otp) {
  return crypto::hash(concat({as_bytes("SEV-PLATFORM-ID"), s_otp})).bytes;
}

Certificate Certificate::make(KeyRole role, ByteView public_key,
                              std::optional<VersionInfo> versions) {
  Certificate c;
  c.subject_role = role;
  c.public_key = to_bytes(public_key);
  c.key_usage = usage_for(role);
  c.version_info = versions;
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(role)).bytes(public_key).boolean(versions.has_value());
  if (versions) w.u32(versions->psp_os_version).u32(versions->sev_fw_version);
  Key32 serial = crypto::kdf("SEV-CERT-SERIAL", {w.data()});
  for (int i = 0; i < 8; ++i) c.serial = (c.serial << 8) | serial[static_cast<std::size_t>(i)];
  return c;
}

Bytes Certificate::tbs_bytes() const {
  ByteWriter w;
  write_tbs(w, *this);
  return std::move(w).take();
}

Bytes Certificate::serialize() const {
  ByteWriter w;
  write_tbs(w, *this);
  w.u32(static_cast<std::uint32_t>(signatures.size()));
  for (const CertSignature& s : signatures) {
    w.u8(static_cast<std::uint8_t>(s.issuer_role)).bytes(s.issuer_key_id).bytes(s.signature);
  }
  return std::move(w).take();
}

Certificate Certificate::deserialize(ByteView in) {
  ByteReader r(in);
  Certificate c = read_cert(r);
  r.expect_end();
  return c;
}

const CertSignature* Certificate::signature_by(KeyRole issuer) const {
  auto it = std::find_if(signatures.begin(), signatures.end(),
                         [&](const CertSignature& s) { return s.issuer_role == issuer; });
  return it == signatures.end() ? nullptr : &*it;
}

Certificate issue(Certificate subject, KeyRole issuer_role, const crypto::SigningKeyPair& issuer_key) {
  if (!permitted_issuer(subject.subject_role, issuer_role)) {
    throw Error(ErrorCode::kImpermissibleIssuer,
                std::string(to_string(issuer_role)) + " may not issue a " +
                    std::string(to_string(subject.subject_role)) + " certificate");
  }
  CertSignature sig{issuer_role, key_id(issuer_key.public_part),
                    crypto::sign(issuer_key, subject.tbs_bytes())};
  auto it = std::find_if(subject.signatures.begin(), subject.signatures.end(),
                         [&](const CertSignature& s) { return s.issuer_role == issuer_role; });
  if (it != subject.signatures.end()) {
    *it = std::move(sig);
  } else {
    subject.signatures.push_back(std::move(sig));
  }
  return subject;
}

std::string render(const Certificate& cert) {
  std::ostringstream os;
  os << to_string(cert.subject_role) << " key=" << crypto::fingerprint(cert.public_key)
     << " usage=" << (cert.key_usage == KeyUsage::kSigning ? "signing" : "key-exchange");
  if (cert.version_info) {
    os << " pv=" << cert.version_info->psp_os_version << " sv=" << cert.version_info->sev_fw_version;
  }
  os << " signers=[";
  for (std::size_t i = 0; i < cert.signatures.size(); ++i) {
    if (i) os << ",";
    os << to_string(cert.signatures[i].issuer_role) << ":"
       << to_hex(ByteView(cert.signatures[i].issuer_key_id).subspan(0, 4));
  }
  os << "]";
  return os.str();
}

Bytes ChainBundle::serialize() const {
  ByteWriter w;
  w.bytes(pdh.serialize()).bytes(pek.serialize()).bytes(cek.serialize());
  w.bytes(ask.serialize()).bytes(ark.serialize()).boolean(oca.has_value());
  if (oca) w.bytes(oca->serialize());
  return std::move(w).take();
}

ChainBundle ChainBundle::deserialize(ByteView in) {
  ByteReader r(in);
  ChainBundle b;
  b.pdh = Certificate::deserialize(r.bytes());
  b.pek = Certificate::deserialize(r.bytes());
  b.cek = Certificate::deserialize(r.bytes());
  b.ask = Certificate::deserialize(r.bytes());
  b.ark = Certificate::deserialize(r.bytes());
  if (r.boolean()) b.oca = Certificate::deserialize(r.bytes());
  r.expect_end();
  return b;
}

std::string_view to_string(ChainFailure failure) {
  switch (failure) {
    case ChainFailure::kNone: return "Ok";
    case ChainFailure::kRoleMismatch: return "RoleMismatch";
    case ChainFailure::kBadKeyUsage: return "BadKeyUsage";
    case ChainFailure::kUntrustedRoot: return "UntrustedRoot";
    case ChainFailure::kMissingSignature: return "MissingSignature";
    case ChainFailure::kBadSignature: return "BadSignature";
    case ChainFailure::kMissingVersionInfo: return "MissingVersionInfo";
    case ChainFailure::kVersionTooLow: return "VersionTooLow";
  }
  return "?";
}

std::string ChainVerdict::describe() const {
  std::string out(to_string(failure));
  if (at) out += "(" + std::string(to_string(*at)) + ")";
  return out;
}

ChainVerdict verify_identity_chain(const ChainBundle& bundle, const Certificate& trusted_ark) {
  struct Slot {
    const Certificate* cert;
    KeyRole role;
  };
  const Slot slots[] = {{&bundle.pdh, KeyRole::kPdh}, {&bundle.pek, KeyRole::kPek},
                        {&bundle.cek, KeyRole::kCek}, {&bundle.ask, KeyRole::kAsk},
                        {&bundle.ark, KeyRole::kArk}};
  for (const Slot& s : slots) {
    if (ChainVerdict v = check_shape(*s.cert, s.role); !v) return v;
  }
  if (bundle.ark.serialize() != trusted_ark.serialize()) {
    return ChainVerdict::fail(ChainFailure::kUntrustedRoot, KeyRole::kArk);
  }
  // Walk from the pinned root down so the first broken link is reported.
  if (ChainVerdict v = check_link(bundle.ark, bundle.ark); !v) return v;
  if (ChainVerdict v = check_link(bundle.ask, bundle.ark); !v) return v;
  if (ChainVerdict v = check_link(bundle.cek, bundle.ask); !v) return v;
  if (ChainVerdict v = check_link(bundle.pek, bundle.cek); !v) return v;
  return check_link(bundle.pdh, bundle.pek);
}

ChainVerdict verify_owner_chain(const Certificate& pdh, const Certificate& pek,
                                const Certificate& trusted_oca) {
  if (ChainVerdict v = check_shape(trusted_oca, KeyRole::kOca); !v) return v;
  if (ChainVerdict v = check_shape(pek, KeyRole::kPek); !v) return v;
  if (ChainVerdict v = check_shape(pdh, KeyRole::kPdh); !v) return v;
  if (ChainVerdict v = check_link(trusted_oca, trusted_oca); !v) return v;
  if (ChainVerdict v = check_link(pek, trusted_oca); !v) return v;
  return check_link(pdh, pek);
}

ChainVerdict check_version_policy(const Certificate& cek, const GuestPolicy& policy) {
  if (!cek.version_info) return ChainVerdict::fail(ChainFailure::kMissingVersionInfo, KeyRole::kCek);
  if (cek.version_info->psp_os_version < policy.min_psp_os_version.value_or(0) ||
      cek.version_info->sev_fw_version < policy.min_sev_fw_version.value_or(0)) {
    return ChainVerdict::fail(ChainFailure::kVersionTooLow, KeyRole::kCek);
  }
  return {};
}

}  // namespace sevsim::certs
