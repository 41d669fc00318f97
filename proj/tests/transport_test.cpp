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

#include <gtest/gtest.h>

#include "sevsim/knowledge.hpp"
#include "sevsim/transport.hpp"
#include "test_world.hpp"

namespace {

using namespace sevsim;
using namespace sevsim::transport;
using testworld::filled;
using crypto::KeyPurpose;
using crypto::SymmetricKey;

Bytes b(std::string_view s) { return to_bytes(as_bytes(s)); }

Bus two_party_bus() {
  Bus bus;
  bus.register_party("a");
  bus.register_party("b");
  return bus;
}

TEST(Bus, VerbatimDeliveryInSeqOrder) {
  Bus bus = two_party_bus();
  EXPECT_EQ(bus.send("a", "b", MsgType::kAck, b("one")), b("one"));
  bus.note("a", "between");
  EXPECT_EQ(bus.send("b", "a", MsgType::kAck, b("two")), b("two"));
  const auto& t = bus.transcript();
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(t[i - 1].seq, t[i].seq);
  EXPECT_EQ(t[0].payload, b("one"));
  EXPECT_EQ(t[2].from, "b");
}

TEST(Bus, UnknownAndInvalidParties) {
  Bus bus = two_party_bus();
  try {
    bus.send("a", "c", MsgType::kAck, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownParty);
  }
  EXPECT_THROW(bus.log_direct("z", "a", MsgType::kAck, {}), Error);
  EXPECT_THROW(bus.register_party(""), Error);
  EXPECT_THROW(bus.register_party("two words"), Error);
  EXPECT_TRUE(bus.transcript().empty());
}

TEST(Bus, ActiveReplaceThenDropInAttachmentOrder) {
  Bus bus = two_party_bus();
  std::vector<std::string> order;
  bus.attach_hook({"first", HookMode::kActive,
                   {{MsgType::kAck, [&](const Envelope& e) {
                       order.push_back("first");
                       Bytes p = e.payload;
                       p.push_back('!');
                       return HookAction::replace(p);
                     }}}});
  bus.attach_hook({"second", HookMode::kActive,
                   {{MsgType::kAck, [&](const Envelope& e) {
                       order.push_back("second saw " + std::string(e.payload.begin(), e.payload.end()));
                       return HookAction::pass();
                     }}}});
  EXPECT_EQ(bus.send("a", "b", MsgType::kAck, b("hi")), b("hi!"));
  EXPECT_EQ(order, (std::vector<std::string>{"first", "second saw hi!"}));
  const Record& r = bus.transcript().back();
  EXPECT_EQ(r.payload, b("hi"));
  EXPECT_EQ(r.replaced, b("hi!"));

  Bus drop = two_party_bus();
  bool later_called = false;
  drop.attach_hook({"dropper", HookMode::kActive,
                    {{MsgType::kAck, [](const Envelope&) { return HookAction::drop("gone"); }}}});
  drop.attach_hook({"later", HookMode::kActive,
                    {{MsgType::kAck, [&](const Envelope&) {
                        later_called = true;
                        return HookAction::pass();
                      }}}});
  EXPECT_FALSE(drop.send("a", "b", MsgType::kAck, b("x")).has_value());
  EXPECT_FALSE(later_called);
  EXPECT_TRUE(drop.transcript().back().dropped);
  EXPECT_FALSE(drop.transcript().back().delivered().has_value());
}

TEST(Bus, PassiveHooksCannotAlterDelivery) {
  Bus bus = two_party_bus();
  bus.attach_hook({"spy", HookMode::kPassive,
                   {{MsgType::kAck, [](const Envelope&) { return HookAction::replace(b("evil")); }},
                    {MsgType::kGuestSecret, [](const Envelope&) { return HookAction::drop(); }}}});
  EXPECT_EQ(bus.send("a", "b", MsgType::kAck, b("ok")), b("ok"));
  EXPECT_EQ(bus.send("a", "b", MsgType::kGuestSecret, b("s")), b("s"));
  for (const Record& r : bus.transcript()) {
    EXPECT_FALSE(r.replaced.has_value());
    EXPECT_FALSE(r.dropped);
  }
}

TEST(Bus, RenderFormat) {
  Bus bus = two_party_bus();
  bus.attach_hook({"h", HookMode::kActive,
                   {{MsgType::kAck, [](const Envelope&) { return HookAction::replace(Bytes{0xff}, "why"); }}}});
  bus.send("a", "b", MsgType::kAck, Bytes{0x01, 0x02});
  bus.log_direct("a", "b", MsgType::kKdsRequest, {});
  bus.record_stage("b", "boot", "detail text");
  bus.note("a", "a note");
  EXPECT_EQ(bus.render(),
            "1 MSG a b Ack 0102 | hook=h why | replaced=ff\n"
            "2 DIRECT a b KdsRequest -\n"
            "3 STAGE b boot detail text\n"
            "4 NOTE a a note\n");
}

// --- knowledge ------------------------------------------------------------------

struct Sealed {
  crypto::ExchangeKeyPair attacker = crypto::ExchangeKeyPair::from_seed(filled(0x31));
  crypto::ExchangeKeyPair client = crypto::ExchangeKeyPair::from_seed(filled(0x32));
  SymmetricKey tek{KeyPurpose::kTek, filled(0x33)};
  SymmetricKey tik{KeyPurpose::kTik, filled(0x34)};

  // LaunchRequest wrapped to `target_public`, then a sealed secret.
  Bus traffic(ByteView target_public) const {
    Key32 master = crypto::dh_shared(client, target_public);
    SymmetricKey kek(KeyPurpose::kKek, crypto::kdf("SEV-KEK", {master}));
    SymmetricKey kik(KeyPurpose::kKik, crypto::kdf("SEV-KIK", {master}));
    msg::LaunchRequest req;
    req.dh_share = client.public_part;
    req.wrapped = crypto::wrap_keys(tek, tik, kek, kik, crypto::Nonce{});
    req.api_version = 1;
    msg::GuestSecret secret{1, msg::seal_message(tek, tik, crypto::Nonce{1}, msg::secret_context(1),
                                                 as_bytes("the-disk-key"))};
    Bus bus = two_party_bus();
    bus.send("a", "b", MsgType::kLaunchRequest, req.encode());
    bus.send("a", "b", MsgType::kGuestSecret, secret.encode());
    return bus;
  }
};

TEST(Knowledge, ClosureDerivesSecretWithMatchingExchangeKey) {
  Sealed s;
  Bus bus = s.traffic(s.attacker.public_part);
  knowledge::KnowledgeSet k;
  k.add_exchange_key(s.attacker);
  k.observe_all(bus.transcript());
  k.close();
  EXPECT_TRUE(k.knows_any_transport_keys());
  EXPECT_TRUE(k.knows_key(s.tek.view()));
  EXPECT_TRUE(k.knows_plaintext_containing(as_bytes("the-disk-key")));
}

TEST(Knowledge, NothingWithoutTheRightKey) {
  Sealed s;
  auto victim = crypto::ExchangeKeyPair::from_seed(filled(0x35));
  Bus bus = s.traffic(victim.public_part);
  knowledge::KnowledgeSet k;
  k.add_exchange_key(s.attacker);
  k.observe_all(bus.transcript());
  k.close();
  EXPECT_FALSE(k.knows_any_transport_keys());
  EXPECT_FALSE(k.knows_plaintext_containing(as_bytes("the-disk-key")));
}

// Direct (key server) records are invisible to the hypervisor.
TEST(Knowledge, DirectTrafficIgnored) {
  Sealed s;
  Bus src = s.traffic(s.attacker.public_part);
  Bus bus = two_party_bus();
  for (const Record& r : src.transcript()) bus.log_direct("a", "b", r.type, r.payload);
  knowledge::KnowledgeSet k;
  k.add_exchange_key(s.attacker);
  k.observe_all(bus.transcript());
  k.close();
  EXPECT_FALSE(k.knows_any_transport_keys());
}

// Both the original and the substituted payload count as observed.
TEST(Knowledge, ReplacedPayloadsObserved) {
  Sealed s;
  Bus src = s.traffic(s.attacker.public_part);
  Bus bus = two_party_bus();
  const auto& t = src.transcript();
  bus.attach_hook({"swap", HookMode::kActive,
                   {{MsgType::kLaunchRequest,
                     [&](const Envelope&) { return HookAction::replace(t[0].payload); }}}});
  bus.send("a", "b", MsgType::kLaunchRequest, Bytes{0});
  bus.send("a", "b", MsgType::kGuestSecret, t[1].payload);
  knowledge::KnowledgeSet k;
  k.add_exchange_key(s.attacker);
  k.observe_all(bus.transcript());
  k.close();
  EXPECT_TRUE(k.knows_plaintext_containing(as_bytes("the-disk-key")));
}

TEST(Knowledge, MalformedPayloadsIgnored) {
  Bus bus = two_party_bus();
  bus.send("a", "b", MsgType::kLaunchRequest, Bytes{1, 2, 3});
  bus.send("a", "b", MsgType::kExportBlob, {});
  knowledge::KnowledgeSet k;
  EXPECT_NO_THROW(k.observe_all(bus.transcript()));
  k.close();
  EXPECT_EQ(k.transport_key_count(), 0u);
}

}  // namespace
