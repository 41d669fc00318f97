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

#include "sevsim/adversary.hpp"

namespace sevsim::adversary {

using certs::Certificate;
using certs::KeyRole;
using crypto::KeyPurpose;
using crypto::SymmetricKey;
using msg::MsgType;

namespace {

std::string reply_stage(const Reply& reply) {
  if (reply.type != MsgType::kErrorReply) return std::string(msg::to_string(reply.type));
  try {
    return msg::ErrorReply::decode(reply.payload).code;
  } catch (const Error&) {
    return "ErrorReply";
  }
}

}  // namespace

void extract_from(AttackerAssets& assets, psp::Platform& donor, keyserver::KeyServerClient& kds,
                  transport::Bus& bus) {
  psp::ExtractedCek cek = donor.extract_cek();
  std::string where = "extract_cek on " + donor.name();
  if (cek.versions) {
    where += " pv=" + std::to_string(cek.versions->psp_os_version) +
             " sv=" + std::to_string(cek.versions->sev_fw_version);
  }
  bus.note(kParty, where + " cek=" + crypto::fingerprint(cek.key.public_part));

  msg::KdsRequest req{cek.platform_id, cek.versions, false};
  bus.log_direct(kParty, kKdsParty, MsgType::kKdsRequest, req.encode());
  try {
    Certificate cert = kds.cek_certificate(cek.platform_id, cek.versions);
    bus.log_direct(kKdsParty, kParty, MsgType::kKdsResponse, cert.serialize());
    assets.extracted_cek_cert = cert;
  } catch (const Error& e) {
    bus.log_direct(kKdsParty, kParty, MsgType::kErrorReply, error_reply(e).payload);
  }
  assets.extracted_cek = std::move(cek);
  assets.provenance = where;
}

FakeSevHost::FakeSevHost(const AttackerAssets& assets, Design design, std::uint32_t api_version,
                         std::uint64_t seed)
    : design_(design), api_version_(api_version), entropy_(seed, "fake-sev-host") {
  crypto::SigningKeyPair cek;
  if (assets.extracted_cek) {
    cek = assets.extracted_cek->key;
    platform_id_ = assets.extracted_cek->platform_id;
    versions_ = assets.extracted_cek->versions;
  } else {
    cek = crypto::SigningKeyPair::from_seed(entropy_.next_key());
    platform_id_ = entropy_.next_key();
  }
  pek_ = crypto::SigningKeyPair::from_seed(entropy_.next_key());
  pdh_ = crypto::ExchangeKeyPair::from_seed(entropy_.next_key());
  pek_cert_ = certs::issue(Certificate::make(KeyRole::kPek, pek_.public_part), KeyRole::kCek, cek);
  pdh_cert_ = certs::issue(Certificate::make(KeyRole::kPdh, pdh_.public_part), KeyRole::kPek, pek_);
}

Reply FakeSevHost::handle(const transport::PartyId&, MsgType type, ByteView payload) {
  try {
    return dispatch(type, payload);
  } catch (const Error& e) {
    return error_reply(e);
  }
}

Reply FakeSevHost::dispatch(MsgType type, ByteView payload) {
  switch (type) {
    case MsgType::kPlatformInfoRequest: {
      msg::PlatformInfo info;
      info.pdh = pdh_cert_;
      info.pek = pek_cert_;
      info.platform_id = platform_id_;
      if (design_ == Design::kEnhanced) info.versions = versions_;
      info.api_version = api_version_;
      return {MsgType::kPlatformInfo, info.encode()};
    }
    case MsgType::kLaunchRequest: {
      auto req = msg::LaunchRequest::decode(payload);
      Key32 master = crypto::dh_shared(pdh_, req.dh_share);
      SymmetricKey kek(KeyPurpose::kKek, crypto::kdf("SEV-KEK", {master}));
      SymmetricKey kik(KeyPurpose::kKik, crypto::kdf("SEV-KIK", {master}));
      auto keys = crypto::unwrap_keys(req.wrapped, kek, kik);
      session_ = keys;
      // The owner's own hash, relayed faithfully.
      msg::ReceiptBody body{measure(req.image, req.policy, req.api_version), req.policy,
                            req.api_version};
      msg::LaunchReceipt receipt;
      receipt.guest_id = next_guest_++;
      receipt.sealed = msg::seal_message(keys.first, keys.second, nonces_.next(),
                                         msg::receipt_context(receipt.guest_id), body.encode());
      return {MsgType::kLaunchReceipt, receipt.encode()};
    }
    case MsgType::kGuestSecret:
      injected_.push_back(msg::GuestSecret::decode(payload));
      return {MsgType::kAck, {}};
    default:
      throw Error(ErrorCode::kInvalidArgument, "fake host ignores this request");
  }
}

AttackOutcome fake_sev(AttackerAssets& assets, owner::GuestOwner& owner,
                       const owner::DeploymentPlan& plan, transport::Bus& bus,
                       const transport::PartyId& host, std::uint32_t api_version,
                       std::uint64_t seed) {
  FakeSevHost fake(assets, plan.design, api_version, seed);
  assets.exchange_keys.push_back(fake.pdh_key());
  bus.note(kParty, std::string("fake SEV host answering as ") + host + " cek source: " +
                       (assets.extracted_cek ? assets.provenance : "self-made"));

  AttackOutcome out;
  out.deployment = owner.deploy(plan, bus, host, fake);
  out.stage = std::string(owner::to_string(out.deployment->reason));
  if (out.deployment->accepted) {
    bus.note(kParty, "guest runs unencrypted with " + std::to_string(fake.injected().size()) +
                         " sealed secret(s) injected; KSM-eligible");
  }
  return out;
}

AttackOutcome migration_attack(AttackerAssets& assets, transport::Bus& bus,
                               const transport::PartyId& source, HostEndpoint& source_endpoint,
                               msg::GuestId guest, keyserver::KeyServerClient& kds,
                               std::uint64_t seed) {
  crypto::EntropySource entropy(seed, "forged-target");
  auto pek = crypto::SigningKeyPair::from_seed(entropy.next_key());
  auto pdh = crypto::ExchangeKeyPair::from_seed(entropy.next_key());
  assets.exchange_keys.push_back(pdh);

  crypto::SigningKeyPair cek = assets.extracted_cek
                                   ? assets.extracted_cek->key
                                   : crypto::SigningKeyPair::from_seed(entropy.next_key());
  auto [ark, ask] = kds.root_certs();
  certs::ChainBundle target;
  target.pdh = certs::issue(Certificate::make(KeyRole::kPdh, pdh.public_part), KeyRole::kPek, pek);
  target.pek = certs::issue(Certificate::make(KeyRole::kPek, pek.public_part), KeyRole::kCek, cek);
  target.cek = assets.extracted_cek_cert ? *assets.extracted_cek_cert
                                         : Certificate::make(KeyRole::kCek, cek.public_part);
  target.ask = ask;
  target.ark = ark;
  bus.note(kParty, "forged migration target pdh=" + crypto::fingerprint(pdh.public_part));

  AttackOutcome out;
  msg::ExportRequest req{guest, target};
  auto reply = exchange(bus, kParty, source, source_endpoint, MsgType::kExportRequest, req.encode());
  if (!reply) {
    out.stage = "Dropped";
    return out;
  }
  out.stage = reply->type == MsgType::kExportBlob ? "Exported" : reply_stage(*reply);
  return out;
}

std::string debug_dump(transport::Bus& bus, const transport::PartyId& host,
                       HostEndpoint& host_endpoint, msg::GuestId guest, std::uint32_t count) {
  for (std::uint32_t i = 0; i < count; ++i) {
    msg::DebugReadRequest req{guest, i};
    auto reply = exchange(bus, kParty, host, host_endpoint, MsgType::kDebugReadRequest, req.encode());
    if (!reply) return "Dropped";
    if (reply->type != MsgType::kDebugReadResponse) return reply_stage(*reply);
  }
  return "DebugRead";
}

AttackOutcome debug_override(AttackerAssets& assets, psp::Platform& victim,
                             const DebugOverrideFirmware& images, owner::GuestOwner& owner,
                             const owner::DeploymentPlan& plan, transport::Bus& bus,
                             const transport::PartyId& host, HostEndpoint& host_endpoint) {
  AttackOutcome out;
  if (!assets.controls_flash) {
    out.stage = "NoFlashAccess";
    return out;
  }
  bus.note(kParty, "rollback " + victim.name() + " to psp_os v" +
                       std::to_string(images.vulnerable_psp_os.version) +
                       " with forged policy-ignoring sev_fw");
  victim.install_firmware(images.vulnerable_psp_os);
  victim.install_firmware(images.patched_sev_fw);
  psp::BootResult boot = victim.boot(victim.design());
  bus.note(kParty, "reboot " + victim.name() + " -> " + std::string(psp::to_string(boot)));
  if (!victim.booted()) {
    out.stage = std::string(psp::to_string(boot));
    return out;
  }
  victim.init_platform();

  out.deployment = owner.deploy(plan, bus, host, host_endpoint);
  const auto regions = static_cast<std::uint32_t>(plan.image.size() + 1);
  if (!out.deployment->accepted) {
    out.stage = std::string(owner::to_string(out.deployment->reason));
    // Nothing was launched; probe anyway so the refusal is on record.
    debug_dump(bus, host, host_endpoint, 1, 1);
    return out;
  }
  out.stage = debug_dump(bus, host, host_endpoint, *out.deployment->guest, regions);
  return out;
}

void decide(AttackOutcome& outcome, const AttackerAssets& assets, const transport::Bus& bus,
            ByteView secret) {
  knowledge::KnowledgeSet k;
  for (const auto& key : assets.exchange_keys) k.add_exchange_key(key);
  k.observe_all(bus.transcript());
  k.close();
  outcome.succeeded = k.knows_plaintext_containing(secret);
  outcome.knowledge = k.summary() + (outcome.succeeded ? " secret=known" : " secret=unknown");
}

}  // namespace sevsim::adversary
