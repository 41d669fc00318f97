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

// Attacks built only from platform-owner capabilities: flash writes, bus
// hooks, key server queries, and a CEK extracted earlier from some chip.
//
// Attack functions report the stage they reached. Whether an attack
// succeeded is never self-reported: decide() closes the knowledge set over
// the transcript and asks whether the guest secret is derivable.

#ifndef SEVSIM_ADVERSARY_HPP_
#define SEVSIM_ADVERSARY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "sevsim/endpoint.hpp"
#include "sevsim/firmware.hpp"
#include "sevsim/knowledge.hpp"
#include "sevsim/owner.hpp"
#include "sevsim/platform.hpp"

namespace sevsim::adversary {

inline constexpr const char* kParty = "adversary";

struct AttackerAssets {
  std::optional<psp::ExtractedCek> extracted_cek;
  std::optional<certs::Certificate> extracted_cek_cert;  // AMD cert matching the extracted key
  std::string provenance;
  bool controls_flash = true;
  std::vector<crypto::ExchangeKeyPair> exchange_keys;  // attacker-generated PDH keys
};

struct AttackOutcome {
  std::string stage;
  std::optional<owner::DeploymentReport> deployment;
  bool succeeded = false;  // filled by decide()
  std::string knowledge;
};

// One-time extraction from `donor`, then a key server query for the matching
// CEK certificate (recorded as direct traffic).
void extract_from(AttackerAssets& assets, psp::Platform& donor,
                  keyserver::KeyServerClient& kds, transport::Bus& bus);

// Impersonates an SEV platform with keys certified by the extracted CEK. With
// no extracted CEK it falls back to a self-made one (no AMD signature).
class FakeSevHost final : public HostEndpoint {
 public:
  FakeSevHost(const AttackerAssets& assets, Design design, std::uint32_t api_version,
              std::uint64_t seed);

  Reply handle(const transport::PartyId& from, msg::MsgType type, ByteView payload) override;

  const crypto::ExchangeKeyPair& pdh_key() const { return pdh_; }
  // Still-sealed secrets handed to the unprotected guest.
  const std::vector<msg::GuestSecret>& injected() const { return injected_; }

 private:
  Reply dispatch(msg::MsgType type, ByteView payload);

  Design design_;
  std::uint32_t api_version_;
  crypto::EntropySource entropy_;
  certs::PlatformId platform_id_{};
  std::optional<certs::VersionInfo> versions_;
  crypto::SigningKeyPair pek_;
  crypto::ExchangeKeyPair pdh_;
  certs::Certificate pek_cert_;
  certs::Certificate pdh_cert_;
  std::optional<std::pair<crypto::SymmetricKey, crypto::SymmetricKey>> session_;
  crypto::NonceCounter nonces_{2};
  msg::GuestId next_guest_ = 1;
  std::vector<msg::GuestSecret> injected_;
};

AttackOutcome fake_sev(AttackerAssets& assets, owner::GuestOwner& owner,
                       const owner::DeploymentPlan& plan, transport::Bus& bus,
                       const transport::PartyId& host, std::uint32_t api_version,
                       std::uint64_t seed);

// Forged migration target. Needs the source guest already running.
AttackOutcome migration_attack(AttackerAssets& assets, transport::Bus& bus,
                               const transport::PartyId& source, HostEndpoint& source_endpoint,
                               msg::GuestId guest, keyserver::KeyServerClient& kds,
                               std::uint64_t seed);

struct DebugOverrideFirmware {
  firmware::FirmwareImage vulnerable_psp_os;  // AMD-signed, older
  firmware::FirmwareImage patched_sev_fw;     // forged, ignores the debug policy
};

// Rolls the victim back, reboots it, lets the owner deploy, then reads every
// guest region through the debug API.
AttackOutcome debug_override(AttackerAssets& assets, psp::Platform& victim,
                             const DebugOverrideFirmware& images, owner::GuestOwner& owner,
                             const owner::DeploymentPlan& plan, transport::Bus& bus,
                             const transport::PartyId& host, HostEndpoint& host_endpoint);

// Reads `count` regions of `guest` through the debug API (over the bus).
// Returns the error code name of the first refusal, or "DebugRead".
std::string debug_dump(transport::Bus& bus, const transport::PartyId& host,
                       HostEndpoint& host_endpoint, msg::GuestId guest, std::uint32_t count);

// Success iff the closed knowledge set contains the secret.
void decide(AttackOutcome& outcome, const AttackerAssets& assets, const transport::Bus& bus,
            ByteView secret);

}  // namespace sevsim::adversary

#endif  // SEVSIM_ADVERSARY_HPP_
