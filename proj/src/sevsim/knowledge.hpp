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

// What the hypervisor-side attacker can derive from the bus transcript.
//
// Start: the attacker's own exchange private keys plus every payload that
// crossed the bus (original and substituted). Closure rules, iterated to a
// fixpoint:
//   exchange key k, observed share S      -> master = DH(k, S) -> KEK, KIK
//   KEK/KIK, observed wrapped blob        -> TEK, TIK
//   TEK/TIK, observed sealed message      -> plaintext
// Direct (key server) traffic is not visible to the hypervisor.

#ifndef SEVSIM_KNOWLEDGE_HPP_
#define SEVSIM_KNOWLEDGE_HPP_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sevsim/crypto.hpp"
#include "sevsim/messages.hpp"
#include "sevsim/transport.hpp"

namespace sevsim::knowledge {

class KnowledgeSet {
 public:
  void add_exchange_key(const crypto::ExchangeKeyPair& key);
  void observe(const transport::Record& record);
  void observe_all(const std::vector<transport::Record>& records);

  // Runs the closure rules until nothing new is derived.
  void close();

  bool knows_plaintext_containing(ByteView needle) const;
  bool knows_key(ByteView key) const;
  bool knows_any_transport_keys() const { return !transport_keys_.empty(); }

  std::size_t plaintext_count() const { return plaintexts_.size(); }
  std::size_t transport_key_count() const { return transport_keys_.size(); }
  std::string summary() const;

 private:
  void observe_payload(msg::MsgType type, ByteView payload);

  std::vector<crypto::ExchangeKeyPair> exchange_keys_;
  std::set<Bytes> shares_;
  std::vector<crypto::WrappedKeys> wrapped_;
  std::vector<msg::SealedMessage> sealed_;
  std::set<std::pair<Key32, Key32>> transport_keys_;  // (TEK, TIK)
  std::set<Bytes> plaintexts_;
};

}  // namespace sevsim::knowledge

#endif  // SEVSIM_KNOWLEDGE_HPP_
