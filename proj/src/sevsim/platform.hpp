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

// One AMD platform: on-chip bootloader, PSP OS and SEV firmware.
//
// Boot order:
//   1. bootloader reads the ARK from flash; mismatch with the fused copy halts
//      the PSP before any further flash read.
//   2. bootloader verifies the PSP OS (falling back to the recovery slot, then
//      resetting) and provisions the CCP slot: s_otp (baseline) or
//      s_psp = kdf("S_PSP", [pv, s_otp]) (enhanced).
//   3. PSP OS verifies the SEV firmware and hands it its secret: the CCP value
//      (baseline) or s_cek = kdf("S_CEK", [sv, s_psp]) (enhanced).
//   4. SEV firmware derives the CEK from that secret.
//
// There is no rollback protection anywhere: any ARK-signed image boots.

#ifndef SEVSIM_PLATFORM_HPP_
#define SEVSIM_PLATFORM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sevsim/certs.hpp"
#include "sevsim/core.hpp"
#include "sevsim/crypto.hpp"
#include "sevsim/firmware.hpp"
#include "sevsim/messages.hpp"
#include "sevsim/policy.hpp"

namespace sevsim::psp {

using msg::GuestId;
using msg::SessionId;

enum class BootResult { kBooted, kRecoveryBooted, kHalted, kReset };

std::string_view to_string(BootResult result);

struct BootedStack {
  std::uint32_t psp_os_version = 0;
  std::uint32_t sev_fw_version = 0;
  firmware::Behavior psp_os_behavior = firmware::Behavior::kHonest;
  firmware::Behavior sev_fw_behavior = firmware::Behavior::kHonest;
  Key32 provisioned_secret{};  // what the SEV firmware received
  certs::PlatformId platform_id{};
};

struct ExtractedCek {
  crypto::SigningKeyPair key;
  certs::PlatformId platform_id{};
  std::optional<certs::VersionInfo> versions;  // set when extracted from an enhanced stack
};

struct PlatformIdentity {
  certs::Certificate pdh;
  certs::Certificate pek;
  certs::PlatformId platform_id{};
};

// Per-guest firmware state. Memory regions are sealed under `mem_key`; the
// image pages come first, an injected secret (if any) is the last region.
struct GuestContext {
  GuestId id = 0;
  GuestPolicy policy;
  crypto::SymmetricKey mem_key{crypto::KeyPurpose::kMem, Key32{}};
  std::vector<Bytes> sealed_regions;
  std::uint32_t image_pages = 0;
  crypto::Digest measurement;
  std::uint32_t api_version = 0;
  std::optional<SessionId> session;
};

using StageSink = std::function<void(std::string_view stage, const std::string& detail)>;

class Platform {
 public:
  Platform(std::string name, const Key32& s_otp, certs::Certificate pinned_ark,
           firmware::FlashContents flash, std::uint64_t entropy_seed);

  const std::string& name() const { return name_; }

  // Boot and firmware events are reported here (transcript stage records).
  void set_stage_sink(StageSink sink) { sink_ = std::move(sink); }

  firmware::FlashContents& flash() { return flash_; }
  const firmware::FlashContents& flash() const { return flash_; }
  void install_firmware(const firmware::FirmwareImage& image);

  // Rebooting wipes all SEV state, sessions and guests.
  BootResult boot(Design design);
  const std::optional<BootedStack>& booted() const { return booted_; }
  Design design() const { return design_; }
  const std::vector<std::string>& flash_reads() const { return flash_reads_; }

  // Throws kCapabilityDenied unless the running stack lets the owner read
  // PSP memory.
  ExtractedCek extract_cek() const;

  PlatformIdentity init_platform();
  bool initialized() const { return sev_.has_value(); }
  // Public half of the CEK the running firmware derived (kNotInitialized before init).
  const Bytes& cek_public() const { return require_sev().cek.public_part; }

  certs::Certificate pek_csr() const;
  void import_signed_pek(const certs::Certificate& oca_signed);
  bool oca_signed() const;

  msg::PlatformInfo platform_info() const;
  std::uint32_t api_version() const;

  SessionId open_channel_as_target(ByteView client_share, const crypto::WrappedKeys& wrapped);
  msg::LaunchReceipt launch_guest(SessionId session, std::vector<Page> image,
                                  const GuestPolicy& policy, std::uint32_t api_version);
  void receive_secret(SessionId session, const msg::GuestSecret& secret);

  msg::ExportBlob export_guest(GuestId guest, const certs::ChainBundle& target);
  GuestId import_guest(const msg::ExportBlob& blob);

  Bytes debug_read(GuestId guest, std::size_t region_index) const;

  std::size_t guest_count() const;
  const GuestContext* guest(GuestId id) const;
  std::optional<std::pair<crypto::SymmetricKey, crypto::SymmetricKey>> session_keys(
      SessionId id) const;

  // Text dump of every value reachable outside the bootloader: booted stack,
  // SEV keys, sessions and sealed guest memory. Never includes s_otp or
  // guest memory keys.
  std::string dump_state() const;

 private:
  struct Session {
    crypto::SymmetricKey tek;
    crypto::SymmetricKey tik;
    std::optional<GuestId> guest;
    crypto::NonceCounter nonces{2};
  };

  struct SevState {
    crypto::SigningKeyPair cek;
    crypto::SigningKeyPair pek;
    certs::Certificate pek_cert;
    crypto::ExchangeKeyPair pdh;
    certs::Certificate pdh_cert;
    std::map<SessionId, Session> sessions;
    std::map<GuestId, GuestContext> guests;
    SessionId next_session = 1;
    GuestId next_guest = 1;
  };

  void stage(std::string_view name, const std::string& detail) const;
  const BootedStack& require_booted() const;
  SevState& require_sev();
  const SevState& require_sev() const;
  bool policy_ignored() const;
  Bytes seal_region(GuestContext& g, ByteView plaintext);
  Bytes open_region(const GuestContext& g, std::size_t index) const;

  std::string name_;
  Key32 s_otp_;
  certs::Certificate pinned_ark_;
  firmware::FlashContents flash_;
  crypto::EntropySource entropy_;
  StageSink sink_;

  Design design_ = Design::kBaseline;
  std::optional<BootedStack> booted_;
  std::optional<SevState> sev_;
  std::vector<std::string> flash_reads_;
  std::uint64_t mem_nonce_ = 0;
  crypto::NonceCounter export_nonces_{3};
};

}  // namespace sevsim::psp

#endif  // SEVSIM_PLATFORM_HPP_
