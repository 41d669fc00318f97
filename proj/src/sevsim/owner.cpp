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

#include "sevsim/owner.hpp"

namespace sevsim::owner {

using crypto::KeyPurpose;
using crypto::SymmetricKey;
using msg::MsgType;

std::string_view to_string(DeployReason reason) {
  switch (reason) {
    case DeployReason::kOk: return "Ok";
    case DeployReason::kChainInvalid: return "ChainInvalid";
    case DeployReason::kVersionDenied: return "VersionDenied";
    case DeployReason::kMeasurementMismatch: return "MeasurementMismatch";
    case DeployReason::kChannelFailure: return "ChannelFailure";
  }
  return "?";
}

crypto::Digest expected_measurement(std::span<const Page> image, const GuestPolicy& policy,
                                    std::uint32_t api_version) {
  return measure(image, policy, api_version);
}

GuestOwner::GuestOwner(transport::PartyId self, transport::PartyId kds_party,
                       certs::Certificate trusted_ark, keyserver::KeyServerClient& kds,
                       std::uint64_t seed)
    : self_(std::move(self)),
      kds_party_(std::move(kds_party)),
      trusted_ark_(std::move(trusted_ark)),
      kds_(kds),
      entropy_(seed, "owner:" + self_) {}

DeploymentReport GuestOwner::fail(transport::Bus& bus, DeployReason reason, std::string detail) {
  bus.record_stage(self_, "deploy", std::string("rejected reason=") + std::string(to_string(reason)) +
                                        " " + detail);
  DeploymentReport r;
  r.accepted = false;
  r.reason = reason;
  r.detail = std::move(detail);
  return r;
}

std::optional<certs::Certificate> GuestOwner::fetch_cek(transport::Bus& bus,
                                                        const msg::PlatformInfo& info,
                                                        const DeploymentPlan& plan,
                                                        DeploymentReport& report) {
  msg::KdsRequest req;
  req.platform_id = info.platform_id;
  if (plan.design == Design::kEnhanced) {
    req.versions = certs::VersionInfo{plan.policy.min_psp_os_version.value_or(0),
                                      plan.policy.min_sev_fw_version.value_or(0)};
  }
  bus.log_direct(self_, kds_party_, MsgType::kKdsRequest, req.encode());
  try {
    certs::Certificate cek = kds_.cek_certificate(req.platform_id, req.versions);
    bus.log_direct(kds_party_, self_, MsgType::kKdsResponse, cek.serialize());
    return cek;
  } catch (const Error& e) {
    bus.log_direct(kds_party_, self_, MsgType::kErrorReply, error_reply(e).payload);
    report = fail(bus,
                  e.code() == ErrorCode::kRevoked ? DeployReason::kVersionDenied
                                                  : DeployReason::kChainInvalid,
                  std::string("key server: ") + e.what());
    return std::nullopt;
  }
}

DeploymentReport GuestOwner::deploy(const DeploymentPlan& plan, transport::Bus& bus,
                                    const transport::PartyId& host, HostEndpoint& endpoint) {
  bus.record_stage(self_, "deploy", "start design=" + std::string(to_string(plan.design)) +
                                        " policy={" + plan.policy.describe() + "}");

  // 1. Platform certificates and id, via the hypervisor.
  auto info_reply = exchange(bus, self_, host, endpoint, MsgType::kPlatformInfoRequest, {});
  if (!info_reply || info_reply->type != MsgType::kPlatformInfo) {
    return fail(bus, DeployReason::kChannelFailure, "no platform info");
  }
  msg::PlatformInfo info;
  try {
    info = msg::PlatformInfo::decode(info_reply->payload);
  } catch (const Error& e) {
    return fail(bus, DeployReason::kChannelFailure, e.what());
  }

  // 2. CEK, ASK and ARK from the key server.
  bus.log_direct(self_, kds_party_, MsgType::kKdsRequest, msg::KdsRequest{{}, {}, true}.encode());
  auto [ark, ask] = kds_.root_certs();
  bus.log_direct(kds_party_, self_, MsgType::kKdsResponse,
                 ByteWriter().bytes(ark.serialize()).bytes(ask.serialize()).take());
  DeploymentReport early;
  auto cek = fetch_cek(bus, info, plan, early);
  if (!cek) return early;

  // 3. Chains of trust.
  certs::ChainBundle bundle{info.pdh, info.pek, *cek, ask, ark, plan.trusted_oca};
  if (auto v = certs::verify_identity_chain(bundle, trusted_ark_); !v) {
    return fail(bus, DeployReason::kChainInvalid, "identity chain: " + v.describe());
  }
  if (plan.trusted_oca) {
    if (auto v = certs::verify_owner_chain(info.pdh, info.pek, *plan.trusted_oca); !v) {
      return fail(bus, DeployReason::kChainInvalid, "owner chain: " + v.describe());
    }
  }
  if (plan.design == Design::kEnhanced) {
    if (auto v = certs::check_version_policy(*cek, plan.policy); !v) {
      return fail(bus, DeployReason::kVersionDenied, v.describe());
    }
  }
  bus.record_stage(self_, "deploy", "chain ok cek=" + crypto::fingerprint(cek->public_key));

  // 4. Secure channel: the client picks the transport keys.
  auto share = crypto::ExchangeKeyPair::from_seed(entropy_.next_key());
  Key32 master;
  try {
    master = crypto::dh_shared(share, info.pdh.public_key);
  } catch (const Error& e) {
    return fail(bus, DeployReason::kChannelFailure, e.what());
  }
  SymmetricKey kek(KeyPurpose::kKek, crypto::kdf("SEV-KEK", {master}));
  SymmetricKey kik(KeyPurpose::kKik, crypto::kdf("SEV-KIK", {master}));
  SymmetricKey tek(KeyPurpose::kTek, entropy_.next_key());
  SymmetricKey tik(KeyPurpose::kTik, entropy_.next_key());

  msg::LaunchRequest launch;
  launch.dh_share = share.public_part;
  launch.wrapped = crypto::wrap_keys(tek, tik, kek, kik, nonces_.next());
  launch.policy = plan.policy;
  launch.api_version = plan.expected_api_version;
  launch.image = plan.image;
  auto receipt_reply = exchange(bus, self_, host, endpoint, MsgType::kLaunchRequest, launch.encode());
  if (!receipt_reply || receipt_reply->type != MsgType::kLaunchReceipt) {
    std::string why = "no launch receipt";
    if (receipt_reply && receipt_reply->type == MsgType::kErrorReply) {
      try {
        why = msg::ErrorReply::decode(receipt_reply->payload).code;
      } catch (const Error&) {
      }
    }
    return fail(bus, DeployReason::kChannelFailure, why);
  }

  // 5. Measurement check against the owner's own copy.
  msg::LaunchReceipt receipt;
  msg::ReceiptBody body;
  try {
    receipt = msg::LaunchReceipt::decode(receipt_reply->payload);
    if (receipt.sealed.context != msg::receipt_context(receipt.guest_id)) {
      return fail(bus, DeployReason::kChannelFailure, "receipt context mismatch");
    }
    body = msg::ReceiptBody::decode(msg::open_message(tek, tik, receipt.sealed));
  } catch (const Error& e) {
    return fail(bus, DeployReason::kChannelFailure, std::string("receipt: ") + e.what());
  }
  if (body.policy != plan.policy) {
    return fail(bus, DeployReason::kMeasurementMismatch, "policy differs");
  }
  if (body.api_version < plan.policy.min_api_version) {
    return fail(bus, DeployReason::kVersionDenied, "api version below minimum");
  }
  crypto::Digest want = expected_measurement(plan.image, plan.policy, body.api_version);
  if (body.measurement != want) {
    return fail(bus, DeployReason::kMeasurementMismatch,
                "got " + body.measurement.hex() + " want " + want.hex());
  }

  // 6. Release the secret.
  msg::GuestSecret secret;
  secret.guest_id = receipt.guest_id;
  secret.sealed = msg::seal_message(tek, tik, nonces_.next(), msg::secret_context(receipt.guest_id),
                                    plan.secret);
  DeploymentReport report;
  report.guest = receipt.guest_id;
  report.transport_keys = std::make_pair(tek, tik);
  report.secret_sent = true;
  auto ack = exchange(bus, self_, host, endpoint, MsgType::kGuestSecret, secret.encode());
  if (!ack || ack->type != MsgType::kAck) {
    report.reason = DeployReason::kChannelFailure;
    report.detail = "secret not acknowledged";
    bus.record_stage(self_, "deploy", "rejected reason=ChannelFailure secret not acknowledged");
    return report;
  }
  report.accepted = true;
  report.reason = DeployReason::kOk;
  bus.record_stage(self_, "deploy", "accepted guest=" + std::to_string(receipt.guest_id) +
                                        " measurement=" + body.measurement.hex());
  return report;
}

}  // namespace sevsim::owner
