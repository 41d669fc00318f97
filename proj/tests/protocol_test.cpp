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

// Owner deployment, attacks, and secret-release gating.

#include <gtest/gtest.h>

#include <random>

#include "sevsim/adversary.hpp"
#include "sevsim/knowledge.hpp"
#include "sevsim/owner.hpp"
#include "test_world.hpp"

namespace {

using namespace sevsim;
using namespace testworld;
using msg::MsgType;
using owner::DeployReason;
using transport::HookAction;
using transport::HookMode;
using transport::RecordKind;

GuestPolicy baseline_policy(bool debug = false, bool migration = false) {
  GuestPolicy p;
  p.debug_allowed = debug;
  p.migration_allowed = migration;
  p.min_api_version = 3;
  return p;
}

TEST(Deploy, HonestBaselineGuestHoldsSecret) {
  World w;
  auto host = w.ready("host", filled(5), Design::kBaseline, 2, 3);
  PlatformHost endpoint(*host);
  auto owner = w.make_owner();
  auto pl = plan(Design::kBaseline, baseline_policy(true), 3);
  auto report = owner.deploy(pl, w.bus, "host", endpoint);
  ASSERT_TRUE(report.accepted) << report.detail;
  EXPECT_EQ(report.reason, DeployReason::kOk);
  EXPECT_TRUE(report.secret_sent);
  ASSERT_TRUE(report.guest.has_value());
  const psp::GuestContext* g = host->guest(*report.guest);
  EXPECT_EQ(g->measurement, owner::expected_measurement(pl.image, pl.policy, 3));
  EXPECT_EQ(host->debug_read(*report.guest, pl.image.size()), pl.secret);
}

TEST(Deploy, HonestEnhanced) {
  World w;
  auto host = w.ready("host", filled(5), Design::kEnhanced, 2, 3);
  PlatformHost endpoint(*host);
  auto owner = w.make_owner();
  auto report = owner.deploy(plan(Design::kEnhanced, enhanced_policy(2, 3, 3), 3), w.bus, "host", endpoint);
  EXPECT_TRUE(report.accepted) << report.detail;
}

TEST(Deploy, EmptyImage) {
  World w;
  auto host = w.ready("host", filled(5), Design::kBaseline, 2, 3);
  PlatformHost endpoint(*host);
  auto owner = w.make_owner();
  auto report = owner.deploy(plan(Design::kBaseline, baseline_policy(), 3, 0), w.bus, "host", endpoint);
  EXPECT_TRUE(report.accepted) << report.detail;
}

TEST(Deploy, ExpectedMeasurementSensitivity) {
  auto img = pages(2);
  GuestPolicy p = baseline_policy();
  auto base = owner::expected_measurement(img, p, 3);
  EXPECT_EQ(base, measure(img, p, 3));
  img[0][0] ^= 1;
  EXPECT_NE(owner::expected_measurement(img, p, 3), base);
  EXPECT_NE(owner::expected_measurement(pages(2), p, 4), base);
  p.debug_allowed = true;
  EXPECT_NE(owner::expected_measurement(pages(2), p, 3), base);
}

// The hypervisor rewrites one image byte in flight.
TEST(Deploy, ActiveImageTamperIsMeasurementMismatch) {
  World w;
  auto host = w.ready("host", filled(5), Design::kBaseline, 2, 3);
  PlatformHost endpoint(*host);
  w.bus.attach_hook({"tamper", HookMode::kActive,
                     {{MsgType::kLaunchRequest, [](const transport::Envelope& env) {
                         auto req = msg::LaunchRequest::decode(env.payload);
                         req.image[1][7] ^= 0x80;
                         return HookAction::replace(req.encode(), "page1 byte7");
                       }}}});
  auto owner = w.make_owner();
  auto report = owner.deploy(plan(Design::kBaseline, baseline_policy(), 3), w.bus, "host", endpoint);
  EXPECT_FALSE(report.accepted);
  EXPECT_EQ(report.reason, DeployReason::kMeasurementMismatch);
  EXPECT_FALSE(report.secret_sent);
  for (const auto& r : w.bus.transcript()) {
    EXPECT_FALSE(r.kind == RecordKind::kMessage && r.type == MsgType::kGuestSecret);
  }
}

// A passive hook that asks to drop everything changes nothing.
TEST(Deploy, PassiveHookLeavesTranscriptPayloadsUnchanged) {
  auto run = [](bool with_hook) {
    World w;
    auto host = w.ready("host", filled(5), Design::kBaseline, 2, 3);
    PlatformHost endpoint(*host);
    if (with_hook) {
      transport::AdversaryHook hook{"spy", HookMode::kPassive, {}};
      for (int t = 1; t <= 13; ++t) {
        hook.handlers[static_cast<MsgType>(t)] = [](const transport::Envelope&) {
          return HookAction::drop("wants to drop");
        };
      }
      w.bus.attach_hook(hook);
    }
    auto owner = w.make_owner();
    auto report = owner.deploy(plan(Design::kBaseline, baseline_policy(), 3), w.bus, "host", endpoint);
    EXPECT_TRUE(report.accepted);
    return w.bus.transcript();
  };
  auto plain = run(false), spied = run(true);
  ASSERT_EQ(plain.size(), spied.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(plain[i].payload, spied[i].payload);
    EXPECT_EQ(plain[i].delivered(), spied[i].delivered());
    EXPECT_EQ(plain[i].text, spied[i].text);
  }
}

TEST(Deploy, OwnerChainWithOca) {
  World w;
  auto host = w.ready("host", filled(5), Design::kBaseline, 2, 3);
  PlatformHost endpoint(*host);
  auto oca = crypto::SigningKeyPair::from_seed(filled(0x0c));
  auto oca_cert = certs::issue(certs::Certificate::make(certs::KeyRole::kOca, oca.public_part),
                               certs::KeyRole::kOca, oca);
  auto owner = w.make_owner();
  auto pl = plan(Design::kBaseline, baseline_policy(), 3);
  pl.trusted_oca = oca_cert;
  EXPECT_EQ(owner.deploy(pl, w.bus, "host", endpoint).reason, DeployReason::kChainInvalid);
  host->import_signed_pek(certs::issue(host->pek_csr(), certs::KeyRole::kOca, oca));
  EXPECT_TRUE(owner.deploy(pl, w.bus, "host", endpoint).accepted);
}

TEST(Deploy, RevokedVersionIsVersionDenied) {
  World w;
  auto host = w.ready("host", filled(5), Design::kEnhanced, 2, 3);
  PlatformHost endpoint(*host);
  w.amd.revoke_firmware(FirmwareKind::kPspOs, 2);
  auto owner = w.make_owner();
  auto report = owner.deploy(plan(Design::kEnhanced, enhanced_policy(2, 3, 3), 3), w.bus, "host", endpoint);
  EXPECT_EQ(report.reason, DeployReason::kVersionDenied);
}

TEST(Deploy, OlderHostThanPolicyIsRejected) {
  World w;
  auto host = w.ready("host", filled(5), Design::kEnhanced, 1, 3, Behavior::kVulnerableSignatureCheck);
  PlatformHost endpoint(*host);
  auto owner = w.make_owner();
  auto report = owner.deploy(plan(Design::kEnhanced, enhanced_policy(2, 3, 3), 3), w.bus, "host", endpoint);
  EXPECT_FALSE(report.accepted);
  EXPECT_TRUE(report.reason == DeployReason::kChainInvalid ||
              report.reason == DeployReason::kVersionDenied);
}

// --- attacks ------------------------------------------------------------------

struct FakeSevRun {
  owner::DeploymentReport report;
  bool learned;
  bool has_keys;
};

FakeSevRun fake_sev_run(Design design, bool extract) {
  World w;
  w.bus.register_party("host");
  adversary::AttackerAssets assets;
  if (extract) {
    auto donor = w.ready("donor", filled(8), design, 1, 3, Behavior::kVulnerableSignatureCheck);
    adversary::extract_from(assets, *donor, w.kds, w.bus);
  }
  GuestPolicy policy = design == Design::kEnhanced ? enhanced_policy(2, 3, 3) : baseline_policy();
  auto pl = plan(design, policy, 3);
  auto owner = w.make_owner();
  auto outcome = adversary::fake_sev(assets, owner, pl, w.bus, "host", 3, 99);
  adversary::decide(outcome, assets, w.bus, pl.secret);
  knowledge::KnowledgeSet ks;
  for (const auto& k : assets.exchange_keys) ks.add_exchange_key(k);
  ks.observe_all(w.bus.transcript());
  ks.close();
  return {*outcome.deployment, outcome.succeeded, ks.knows_any_transport_keys()};
}

TEST(FakeSev, BaselineOwnerAcceptsAndSecretLeaks) {
  auto r = fake_sev_run(Design::kBaseline, true);
  EXPECT_TRUE(r.report.accepted);
  EXPECT_TRUE(r.learned);
  EXPECT_TRUE(r.has_keys);
}

TEST(FakeSev, EnhancedChainInvalidNothingLearned) {
  auto r = fake_sev_run(Design::kEnhanced, true);
  EXPECT_EQ(r.report.reason, DeployReason::kChainInvalid);
  EXPECT_FALSE(r.learned);
  EXPECT_FALSE(r.has_keys);
}

TEST(FakeSev, NoExtractedCekFailsChain) {
  auto r = fake_sev_run(Design::kBaseline, false);
  EXPECT_EQ(r.report.reason, DeployReason::kChainInvalid);
  EXPECT_FALSE(r.learned);
}

adversary::AttackOutcome migration_run(Design design, bool migration_allowed) {
  World w;
  auto host = w.ready("host", filled(5), design, 2, 3);
  PlatformHost endpoint(*host);
  GuestPolicy policy = design == Design::kEnhanced ? enhanced_policy(2, 3, 3) : baseline_policy();
  policy.migration_allowed = migration_allowed;
  auto pl = plan(design, policy, 3);
  auto owner = w.make_owner();
  auto report = owner.deploy(pl, w.bus, "host", endpoint);
  EXPECT_TRUE(report.accepted);
  adversary::AttackerAssets assets;
  auto donor = w.ready("donor", filled(8), design, 1, 3, Behavior::kVulnerableSignatureCheck);
  adversary::extract_from(assets, *donor, w.kds, w.bus);
  auto outcome = adversary::migration_attack(assets, w.bus, "host", endpoint, *report.guest, w.kds, 5);
  adversary::decide(outcome, assets, w.bus, pl.secret);
  return outcome;
}

TEST(Migration, BaselineSucceeds) {
  auto o = migration_run(Design::kBaseline, true);
  EXPECT_EQ(o.stage, "Exported");
  EXPECT_TRUE(o.succeeded);
}

TEST(Migration, BaselinePolicyDenied) {
  auto o = migration_run(Design::kBaseline, false);
  EXPECT_EQ(o.stage, "PolicyDenied");
  EXPECT_FALSE(o.succeeded);
}

TEST(Migration, EnhancedTargetVersionDenied) {
  auto o = migration_run(Design::kEnhanced, true);
  EXPECT_EQ(o.stage, "TargetVersionDenied");
  EXPECT_FALSE(o.succeeded);
}

adversary::AttackOutcome debug_override_run(Design design) {
  World w;
  auto host = w.ready("host", filled(5), design, 2, 3);
  PlatformHost endpoint(*host);
  GuestPolicy policy = design == Design::kEnhanced ? enhanced_policy(2, 3, 3) : baseline_policy();
  auto pl = plan(design, policy, 3);
  auto owner = w.make_owner();
  adversary::AttackerAssets assets;
  adversary::DebugOverrideFirmware fw{
      w.image(FirmwareKind::kPspOs, 1, Behavior::kVulnerableSignatureCheck),
      w.image(FirmwareKind::kSevFw, 3, Behavior::kPatchedIgnoresPolicy)};
  auto outcome = adversary::debug_override(assets, *host, fw, owner, pl, w.bus, "host", endpoint);
  adversary::decide(outcome, assets, w.bus, pl.secret);
  return outcome;
}

TEST(DebugOverride, BaselineReadsSecretDespitePolicy) {
  auto o = debug_override_run(Design::kBaseline);
  EXPECT_EQ(o.stage, "DebugRead");
  EXPECT_TRUE(o.deployment->accepted);
  EXPECT_TRUE(o.succeeded);
}

TEST(DebugOverride, EnhancedDeploymentRejected) {
  auto o = debug_override_run(Design::kEnhanced);
  EXPECT_FALSE(o.deployment->accepted);
  EXPECT_TRUE(o.stage == "ChainInvalid" || o.stage == "VersionDenied") << o.stage;
  EXPECT_FALSE(o.succeeded);
}

// Rolling back after a completed enhanced deployment wipes the guest.
TEST(DebugOverride, RollbackAfterDeploymentFindsNoGuest) {
  World w;
  auto host = w.ready("host", filled(5), Design::kEnhanced, 2, 3);
  PlatformHost endpoint(*host);
  auto owner = w.make_owner();
  auto pl = plan(Design::kEnhanced, enhanced_policy(2, 3, 3), 3);
  auto report = owner.deploy(pl, w.bus, "host", endpoint);
  ASSERT_TRUE(report.accepted);
  host->install_firmware(w.image(FirmwareKind::kPspOs, 1, Behavior::kVulnerableSignatureCheck));
  host->install_firmware(w.image(FirmwareKind::kSevFw, 3, Behavior::kPatchedIgnoresPolicy));
  ASSERT_EQ(host->boot(Design::kEnhanced), psp::BootResult::kBooted);
  host->init_platform();
  EXPECT_EQ(adversary::debug_dump(w.bus, "host", endpoint, *report.guest, 3), "NotFound");
  adversary::AttackerAssets none;
  adversary::AttackOutcome o{"NotFound", report, false, {}};
  adversary::decide(o, none, w.bus, pl.secret);
  EXPECT_FALSE(o.succeeded);
}

// --- secret-release gating over random adversaries ------------------------------

// Mutates, drops or passes each bus message at random.
transport::AdversaryHook random_hook(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  transport::AdversaryHook hook{"fuzz", HookMode::kActive, {}};
  for (MsgType t : {MsgType::kPlatformInfoRequest, MsgType::kPlatformInfo, MsgType::kLaunchRequest,
                    MsgType::kLaunchReceipt, MsgType::kGuestSecret, MsgType::kAck}) {
    hook.handlers[t] = [rng](const transport::Envelope& env) {
      switch ((*rng)() % 6) {
        case 0: return HookAction::drop();
        case 1:
        case 2: {
          if (env.payload.empty()) return HookAction::replace(Bytes{0});
          Bytes p = env.payload;
          std::size_t at = (*rng)() % p.size();
          p[at] ^= static_cast<std::uint8_t>(1 + (*rng)() % 255);
          return HookAction::replace(p, "flip@" + std::to_string(at));
        }
        default: return HookAction::pass();
      }
    };
  }
  return hook;
}

TEST(Gating, SecretOnlyAfterChainAndMeasurementPass) {
  int sent = 0, withheld = 0;
  for (std::uint64_t run = 0; run < 300; ++run) {
    World w(run);
    Design design = run % 2 ? Design::kEnhanced : Design::kBaseline;
    GuestPolicy policy = design == Design::kEnhanced ? enhanced_policy(2, 3, 3) : baseline_policy();
    auto pl = plan(design, policy, 3);
    auto host = w.ready("host", filled(5), design, 2, 3);
    PlatformHost endpoint(*host);
    w.bus.attach_hook(random_hook(run * 7919 + 1));
    auto owner = w.make_owner();
    auto report = owner.deploy(pl, w.bus, "host", endpoint);
    if (report.accepted) ASSERT_EQ(report.reason, DeployReason::kOk);

    bool chain_ok = false;
    std::optional<Bytes> last_receipt;
    bool secret_msg = false;
    for (const auto& r : w.bus.transcript()) {
      if (r.kind == RecordKind::kStage && r.from == "owner" && r.text.rfind("chain ok", 0) == 0) {
        chain_ok = true;
      }
      if (r.kind != RecordKind::kMessage) continue;
      if (r.type == MsgType::kLaunchReceipt && r.to == "owner") last_receipt = r.delivered();
      if (r.type == MsgType::kGuestSecret && r.from == "owner") {
        secret_msg = true;
        ASSERT_TRUE(chain_ok) << "run " << run;
        ASSERT_TRUE(last_receipt.has_value()) << "run " << run;
        ASSERT_TRUE(report.transport_keys.has_value());
        auto receipt = msg::LaunchReceipt::decode(*last_receipt);
        auto body = msg::ReceiptBody::decode(msg::open_message(
            report.transport_keys->first, report.transport_keys->second, receipt.sealed));
        ASSERT_EQ(body.measurement, owner::expected_measurement(pl.image, pl.policy, body.api_version))
            << "run " << run;
      }
    }
    ASSERT_EQ(secret_msg, report.secret_sent) << "run " << run;
    (secret_msg ? sent : withheld)++;
  }
  // Both branches were exercised.
  EXPECT_GT(sent, 10);
  EXPECT_GT(withheld, 10);
}

}  // namespace
