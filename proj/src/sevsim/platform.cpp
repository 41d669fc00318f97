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

#include "sevsim/platform.hpp"

#include <algorithm>
#include <sstream>

namespace sevsim::psp {

using certs::Certificate;
using certs::KeyRole;
using crypto::KeyPurpose;
using crypto::SymmetricKey;
using firmware::Behavior;
using firmware::FirmwareImage;
using firmware::FirmwareKind;

namespace {

std::string image_summary(const FirmwareImage& img) {
  std::ostringstream os;
  os << "v=" << img.version << " behavior=" << firmware::to_string(img.behavior);
  return os.str();
}

std::string region_aad(GuestId guest, std::size_t index) {
  return "guest=" + std::to_string(guest) + ":region=" + std::to_string(index);
}

std::pair<SymmetricKey, SymmetricKey> derive_kek_kik(const Key32& master) {
  return {SymmetricKey(KeyPurpose::kKek, crypto::kdf("SEV-KEK", {master})),
          SymmetricKey(KeyPurpose::kKik, crypto::kdf("SEV-KIK", {master}))};
}

}  // namespace

std::string_view to_string(BootResult result) {
  switch (result) {
    case BootResult::kBooted: return "Booted";
    case BootResult::kRecoveryBooted: return "RecoveryBooted";
    case BootResult::kHalted: return "Halted";
    case BootResult::kReset: return "Reset";
  }
  return "?";
}

Platform::Platform(std::string name, const Key32& s_otp, Certificate pinned_ark,
                   firmware::FlashContents flash, std::uint64_t entropy_seed)
    : name_(std::move(name)),
      s_otp_(s_otp),
      pinned_ark_(std::move(pinned_ark)),
      flash_(std::move(flash)),
      entropy_(entropy_seed, "platform:" + name_) {}

void Platform::stage(std::string_view name, const std::string& detail) const {
  if (sink_) sink_(name, detail);
}

void Platform::install_firmware(const FirmwareImage& image) {
  firmware::install_firmware(flash_, image);
  stage("flash", "write " + std::string(firmware::to_string(image.kind)) + " " +
                     image_summary(image));
}

BootResult Platform::boot(Design design) {
  booted_.reset();
  sev_.reset();
  flash_reads_.clear();
  design_ = design;

  // On-chip bootloader.
  flash_reads_.push_back("ark");
  if (flash_.ark_public != pinned_ark_.public_key) {
    stage("bootloader", "ark=mismatch result=Halted");
    return BootResult::kHalted;
  }
  const certs::PlatformId platform_id = certs::derive_platform_id(s_otp_);
  stage("bootloader", "ark=match otp=" + to_hex(s_otp_) + " platform_id=" + to_hex(platform_id));

  BootResult result = BootResult::kBooted;
  flash_reads_.push_back("psp_os");
  const FirmwareImage* psp_os = &flash_.psp_os;
  if (!firmware::verify_image(*psp_os, flash_.ark_public, FirmwareKind::kPspOs)) {
    stage("bootloader", "psp_os " + image_summary(*psp_os) + " signature=bad -> recovery");
    flash_reads_.push_back("psp_os_recovery");
    psp_os = &flash_.psp_os_recovery;
    if (!firmware::verify_image(*psp_os, flash_.ark_public, FirmwareKind::kPspOs)) {
      stage("bootloader", "psp_os_recovery " + image_summary(*psp_os) + " signature=bad result=Reset");
      return BootResult::kReset;
    }
    result = BootResult::kRecoveryBooted;
  }

  Key32 ccp_slot = s_otp_;
  if (design == Design::kEnhanced) {
    Bytes pv = crypto::encode_u32(psp_os->version);
    ccp_slot = crypto::kdf("S_PSP", {pv, s_otp_});
  }
  stage("bootloader", "psp_os " + image_summary(*psp_os) + " signature=ok ccp=" + to_hex(ccp_slot));

  // PSP OS. The ARK copy left in memory by the bootloader is reused; a
  // vulnerable PSP OS loads the SEV firmware regardless of its signature.
  flash_reads_.push_back("sev_fw");
  const FirmwareImage& sev_fw = flash_.sev_fw;
  const bool sev_sig_ok = firmware::verify_image(sev_fw, flash_.ark_public, FirmwareKind::kSevFw);
  const bool bypass = psp_os->behavior == Behavior::kVulnerableSignatureCheck;
  if (!sev_sig_ok && !bypass) {
    stage("psp_os", "sev_fw " + image_summary(sev_fw) + " signature=bad result=Halted");
    return BootResult::kHalted;
  }
  Key32 sev_secret = ccp_slot;
  if (design == Design::kEnhanced) {
    Bytes sv = crypto::encode_u32(sev_fw.version);
    sev_secret = crypto::kdf("S_CEK", {sv, ccp_slot});
  }
  stage("psp_os", "ccp=" + to_hex(ccp_slot) + " sev_fw " + image_summary(sev_fw) +
                      (sev_sig_ok ? " signature=ok" : " signature=bypassed") +
                      " sev_secret=" + to_hex(sev_secret));

  BootedStack stack;
  stack.psp_os_version = psp_os->version;
  stack.sev_fw_version = sev_fw.version;
  stack.psp_os_behavior = psp_os->behavior;
  stack.sev_fw_behavior = sev_fw.behavior;
  stack.provisioned_secret = sev_secret;
  stack.platform_id = platform_id;
  booted_ = stack;
  return result;
}

const BootedStack& Platform::require_booted() const {
  if (!booted_) throw Error(ErrorCode::kNotBooted, name_ + " is not booted");
  return *booted_;
}

Platform::SevState& Platform::require_sev() {
  require_booted();
  if (!sev_) throw Error(ErrorCode::kNotInitialized, name_ + " SEV platform not initialized");
  return *sev_;
}

const Platform::SevState& Platform::require_sev() const {
  require_booted();
  if (!sev_) throw Error(ErrorCode::kNotInitialized, name_ + " SEV platform not initialized");
  return *sev_;
}

bool Platform::policy_ignored() const {
  return booted_ && booted_->sev_fw_behavior == Behavior::kPatchedIgnoresPolicy;
}

ExtractedCek Platform::extract_cek() const {
  const BootedStack& stack = require_booted();
  if (stack.psp_os_behavior != Behavior::kVulnerableSignatureCheck &&
      stack.sev_fw_behavior != Behavior::kExposesMemoryReadWrite) {
    throw Error(ErrorCode::kCapabilityDenied,
                name_ + ": running firmware does not expose PSP memory");
  }
  ExtractedCek out;
  out.key = crypto::SigningKeyPair::from_seed(crypto::kdf("CEK", {stack.provisioned_secret}));
  out.platform_id = stack.platform_id;
  if (design_ == Design::kEnhanced) {
    out.versions = certs::VersionInfo{stack.psp_os_version, stack.sev_fw_version};
  }
  stage("extract", "CEK key=" + crypto::fingerprint(out.key.public_part) +
                         " from " + name_);
  return out;
}

PlatformIdentity Platform::init_platform() {
  const BootedStack& stack = require_booted();
  SevState st;
  st.cek = crypto::SigningKeyPair::from_seed(crypto::kdf("CEK", {stack.provisioned_secret}));
  st.pek = crypto::SigningKeyPair::from_seed(entropy_.next_key());
  st.pdh = crypto::ExchangeKeyPair::from_seed(entropy_.next_key());
  st.pek_cert = certs::issue(Certificate::make(KeyRole::kPek, st.pek.public_part), KeyRole::kCek,
                             st.cek);
  st.pdh_cert = certs::issue(Certificate::make(KeyRole::kPdh, st.pdh.public_part), KeyRole::kPek,
                             st.pek);
  stage("sev_fw", "init secret=" + to_hex(stack.provisioned_secret) +
                      " cek=" + crypto::fingerprint(st.cek.public_part) +
                      " pek=" + crypto::fingerprint(st.pek.public_part) +
                      " pdh=" + crypto::fingerprint(st.pdh.public_part));
  sev_ = std::move(st);
  return {sev_->pdh_cert, sev_->pek_cert, stack.platform_id};
}

Certificate Platform::pek_csr() const {
  const SevState& st = require_sev();
  return Certificate::make(KeyRole::kPek, st.pek.public_part);
}

void Platform::import_signed_pek(const Certificate& oca_signed) {
  SevState& st = require_sev();
  if (oca_signed.subject_role != KeyRole::kPek || oca_signed.public_key != st.pek.public_part ||
      oca_signed.tbs_bytes() != st.pek_cert.tbs_bytes()) {
    throw Error(ErrorCode::kRejected, "imported certificate is not for the current PEK");
  }
  const certs::CertSignature* oca_sig = oca_signed.signature_by(KeyRole::kOca);
  if (oca_sig == nullptr) throw Error(ErrorCode::kRejected, "imported PEK carries no OCA signature");
  auto& sigs = st.pek_cert.signatures;
  sigs.erase(std::remove_if(sigs.begin(), sigs.end(),
                            [](const certs::CertSignature& s) { return s.issuer_role == KeyRole::kOca; }),
             sigs.end());
  sigs.push_back(*oca_sig);
}

bool Platform::oca_signed() const {
  return sev_ && sev_->pek_cert.signature_by(KeyRole::kOca) != nullptr;
}

std::uint32_t Platform::api_version() const { return require_booted().sev_fw_version; }

msg::PlatformInfo Platform::platform_info() const {
  const SevState& st = require_sev();
  msg::PlatformInfo info;
  info.pdh = st.pdh_cert;
  info.pek = st.pek_cert;
  info.platform_id = booted_->platform_id;
  if (design_ == Design::kEnhanced) {
    info.versions = certs::VersionInfo{booted_->psp_os_version, booted_->sev_fw_version};
  }
  info.api_version = booted_->sev_fw_version;
  return info;
}

SessionId Platform::open_channel_as_target(ByteView client_share,
                                           const crypto::WrappedKeys& wrapped) {
  SevState& st = require_sev();
  try {
    Key32 master = crypto::dh_shared(st.pdh, client_share);
    auto [kek, kik] = derive_kek_kik(master);
    auto [tek, tik] = crypto::unwrap_keys(wrapped, kek, kik);
    SessionId id = st.next_session++;
    st.sessions.emplace(id, Session{tek, tik, std::nullopt});
    return id;
  } catch (const Error& e) {
    throw Error(ErrorCode::kChannelRejected, std::string("secure channel rejected: ") + e.what());
  }
}

Bytes Platform::seal_region(GuestContext& g, ByteView plaintext) {
  crypto::Nonce nonce = crypto::NonceCounter(4).next();
  ByteWriter n;
  n.u32(4).u64(mem_nonce_++);
  std::copy(n.data().begin(), n.data().end(), nonce.begin());
  std::string aad = region_aad(g.id, g.sealed_regions.size());
  Bytes ct = crypto::aead_seal(g.mem_key, nonce, plaintext, as_bytes(aad));
  return concat({nonce, ct});
}

Bytes Platform::open_region(const GuestContext& g, std::size_t index) const {
  const Bytes& region = g.sealed_regions.at(index);
  crypto::Nonce nonce{};
  std::copy_n(region.begin(), nonce.size(), nonce.begin());
  std::string aad = region_aad(g.id, index);
  return crypto::aead_open(g.mem_key, nonce, ByteView(region).subspan(nonce.size()),
                           as_bytes(aad));
}

msg::LaunchReceipt Platform::launch_guest(SessionId session_id, std::vector<Page> image,
                                          const GuestPolicy& policy, std::uint32_t api_version) {
  SevState& st = require_sev();
  auto sit = st.sessions.find(session_id);
  if (sit == st.sessions.end()) throw Error(ErrorCode::kNoSession, "no such session");
  Session& session = sit->second;
  if (session.guest) throw Error(ErrorCode::kRejected, "session already launched a guest");

  if (!policy_ignored()) {
    if (api_version != booted_->sev_fw_version) {
      throw Error(ErrorCode::kRejected, "claimed API version does not match firmware");
    }
    if (api_version < policy.min_api_version) {
      throw Error(ErrorCode::kPolicyDenied, "firmware API version below policy minimum");
    }
  }

  GuestContext g;
  g.id = st.next_guest++;
  g.policy = policy;
  g.api_version = api_version;
  g.measurement = measure(image, policy, api_version);
  g.mem_key = SymmetricKey(KeyPurpose::kMem, entropy_.next_key());
  g.image_pages = static_cast<std::uint32_t>(image.size());
  g.session = session_id;
  for (const Page& page : image) g.sealed_regions.push_back(seal_region(g, page));

  msg::ReceiptBody body{g.measurement, policy, api_version};
  msg::LaunchReceipt receipt;
  receipt.guest_id = g.id;
  receipt.sealed = msg::seal_message(session.tek, session.tik, session.nonces.next(),
                                     msg::receipt_context(g.id), body.encode());
  session.guest = g.id;
  stage("sev_fw", "launch guest=" + std::to_string(g.id) + " pages=" +
                      std::to_string(g.image_pages) + " measurement=" + g.measurement.hex());
  st.guests.emplace(g.id, std::move(g));
  return receipt;
}

void Platform::receive_secret(SessionId session_id, const msg::GuestSecret& secret) {
  SevState& st = require_sev();
  auto sit = st.sessions.find(session_id);
  if (sit == st.sessions.end()) throw Error(ErrorCode::kNoSession, "no such session");
  const Session& session = sit->second;
  if (!session.guest || *session.guest != secret.guest_id ||
      secret.sealed.context != msg::secret_context(secret.guest_id)) {
    throw Error(ErrorCode::kRejected, "secret is not bound to this session's guest");
  }
  GuestContext& g = st.guests.at(*session.guest);
  if (g.sealed_regions.size() != g.image_pages) {
    throw Error(ErrorCode::kRejected, "guest secret already injected");
  }
  Bytes plaintext;
  try {
    plaintext = msg::open_message(session.tek, session.tik, secret.sealed);
  } catch (const Error&) {
    throw Error(ErrorCode::kRejected, "guest secret failed authentication");
  }
  g.sealed_regions.push_back(seal_region(g, plaintext));
  stage("sev_fw", "secret injected guest=" + std::to_string(g.id));
}

msg::ExportBlob Platform::export_guest(GuestId guest_id, const certs::ChainBundle& target) {
  SevState& st = require_sev();
  auto git = st.guests.find(guest_id);
  if (git == st.guests.end()) throw Error(ErrorCode::kNotFound, "no such guest");
  GuestContext& g = git->second;
  if (!g.policy.migration_allowed) {
    throw Error(ErrorCode::kPolicyDenied, "guest policy forbids migration");
  }
  if (auto v = certs::verify_identity_chain(target, pinned_ark_); !v) {
    throw Error(ErrorCode::kTargetRejected, "target chain invalid: " + v.describe());
  }
  if (design_ == Design::kEnhanced) {
    if (auto v = certs::check_version_policy(target.cek, g.policy); !v) {
      throw Error(ErrorCode::kTargetVersionDenied, "target firmware versions: " + v.describe());
    }
  }

  auto eph = crypto::ExchangeKeyPair::from_seed(entropy_.next_key());
  Key32 master = crypto::dh_shared(eph, target.pdh.public_key);
  auto [kek, kik] = derive_kek_kik(master);
  SymmetricKey tek(KeyPurpose::kTek, entropy_.next_key());
  SymmetricKey tik(KeyPurpose::kTik, entropy_.next_key());

  msg::ExportBlob blob;
  blob.dh_share = eph.public_part;
  blob.wrapped = crypto::wrap_keys(tek, tik, kek, kik, export_nonces_.next());
  msg::ManifestBody manifest{g.policy, g.api_version, g.measurement, g.image_pages,
                             static_cast<std::uint32_t>(g.sealed_regions.size())};
  blob.manifest = msg::seal_message(tek, tik, export_nonces_.next(), msg::manifest_context(),
                                    manifest.encode());
  for (std::size_t i = 0; i < g.sealed_regions.size(); ++i) {
    blob.regions.push_back(msg::seal_message(tek, tik, export_nonces_.next(),
                                             msg::region_context(static_cast<std::uint32_t>(i)),
                                             open_region(g, i)));
  }
  stage("sev_fw", "export guest=" + std::to_string(guest_id) + " target_pdh=" +
                      crypto::fingerprint(target.pdh.public_key));
  return blob;
}

GuestId Platform::import_guest(const msg::ExportBlob& blob) {
  SevState& st = require_sev();
  try {
    Key32 master = crypto::dh_shared(st.pdh, blob.dh_share);
    auto [kek, kik] = derive_kek_kik(master);
    auto [tek, tik] = crypto::unwrap_keys(blob.wrapped, kek, kik);
    if (blob.manifest.context != msg::manifest_context()) {
      throw Error(ErrorCode::kIntegrityFailure, "manifest context mismatch");
    }
    auto manifest = msg::ManifestBody::decode(msg::open_message(tek, tik, blob.manifest));
    if (manifest.region_count != blob.regions.size() || manifest.image_pages > manifest.region_count) {
      throw Error(ErrorCode::kIntegrityFailure, "region count mismatch");
    }
    std::vector<Bytes> plain;
    for (std::uint32_t i = 0; i < blob.regions.size(); ++i) {
      if (blob.regions[i].context != msg::region_context(i)) {
        throw Error(ErrorCode::kIntegrityFailure, "region context mismatch");
      }
      plain.push_back(msg::open_message(tek, tik, blob.regions[i]));
    }
    std::vector<Page> image(plain.begin(), plain.begin() + manifest.image_pages);
    if (measure(image, manifest.policy, manifest.api_version) != manifest.measurement) {
      throw Error(ErrorCode::kIntegrityFailure, "measurement mismatch");
    }

    GuestContext g;
    g.id = st.next_guest++;
    g.policy = manifest.policy;
    g.api_version = manifest.api_version;
    g.measurement = manifest.measurement;
    g.image_pages = manifest.image_pages;
    g.mem_key = SymmetricKey(KeyPurpose::kMem, entropy_.next_key());
    for (const Bytes& region : plain) g.sealed_regions.push_back(seal_region(g, region));
    stage("sev_fw", "import guest=" + std::to_string(g.id) + " regions=" +
                        std::to_string(g.sealed_regions.size()));
    GuestId id = g.id;
    st.guests.emplace(id, std::move(g));
    return id;
  } catch (const Error& e) {
    throw Error(ErrorCode::kImportRejected, std::string("import rejected: ") + e.what());
  }
}

Bytes Platform::debug_read(GuestId guest_id, std::size_t region_index) const {
  if (!sev_) throw Error(ErrorCode::kNotFound, "no such guest");
  auto git = sev_->guests.find(guest_id);
  if (git == sev_->guests.end()) throw Error(ErrorCode::kNotFound, "no such guest");
  const GuestContext& g = git->second;
  if (!g.policy.debug_allowed && !policy_ignored()) {
    throw Error(ErrorCode::kPolicyDenied, "guest policy forbids debugging");
  }
  if (region_index >= g.sealed_regions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "region index out of range");
  }
  return open_region(g, region_index);
}

std::size_t Platform::guest_count() const { return sev_ ? sev_->guests.size() : 0; }

const GuestContext* Platform::guest(GuestId id) const {
  if (!sev_) return nullptr;
  auto it = sev_->guests.find(id);
  return it == sev_->guests.end() ? nullptr : &it->second;
}

std::optional<std::pair<SymmetricKey, SymmetricKey>> Platform::session_keys(SessionId id) const {
  if (!sev_) return std::nullopt;
  auto it = sev_->sessions.find(id);
  if (it == sev_->sessions.end()) return std::nullopt;
  return std::make_pair(it->second.tek, it->second.tik);
}

std::string Platform::dump_state() const {
  std::ostringstream os;
  os << "[platform " << name_ << "]\n";
  os << "design=" << to_string(design_) << "\n";
  os << "flash.psp_os " << image_summary(flash_.psp_os) << "\n";
  os << "flash.psp_os_recovery " << image_summary(flash_.psp_os_recovery) << "\n";
  os << "flash.sev_fw " << image_summary(flash_.sev_fw) << "\n";
  if (!booted_) {
    os << "booted=no\n";
    return os.str();
  }
  os << "booted=yes pv=" << booted_->psp_os_version << " sv=" << booted_->sev_fw_version << "\n";
  os << "platform_id=" << to_hex(booted_->platform_id) << "\n";
  os << "provisioned_secret=" << to_hex(booted_->provisioned_secret) << "\n";
  if (!sev_) return os.str();
  os << "cek.private=" << to_hex(sev_->cek.private_part) << "\n";
  os << "pek.private=" << to_hex(sev_->pek.private_part) << "\n";
  os << "pdh.private=" << to_hex(sev_->pdh.private_part) << "\n";
  os << "pek.cert=" << to_hex(sev_->pek_cert.serialize()) << "\n";
  os << "pdh.cert=" << to_hex(sev_->pdh_cert.serialize()) << "\n";
  for (const auto& [id, s] : sev_->sessions) {
    os << "session " << id << " tek=" << to_hex(s.tek.view()) << " tik=" << to_hex(s.tik.view())
       << "\n";
  }
  for (const auto& [id, g] : sev_->guests) {
    os << "guest " << id << " policy={" << g.policy.describe() << "} measurement="
       << g.measurement.hex() << " api=" << g.api_version << "\n";
    for (std::size_t i = 0; i < g.sealed_regions.size(); ++i) {
      os << "  region " << i << " sealed=" << to_hex(g.sealed_regions[i]) << "\n";
    }
  }
  return os.str();
}

}  // namespace sevsim::psp
