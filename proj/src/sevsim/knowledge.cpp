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

#include "sevsim/knowledge.hpp"

#include <algorithm>
#include <sstream>

namespace sevsim::knowledge {

using crypto::KeyPurpose;
using crypto::SymmetricKey;
using msg::MsgType;

void KnowledgeSet::add_exchange_key(const crypto::ExchangeKeyPair& key) {
  exchange_keys_.push_back(key);
}

void KnowledgeSet::observe_all(const std::vector<transport::Record>& records) {
  for (const auto& r : records) observe(r);
}

void KnowledgeSet::observe(const transport::Record& record) {
  if (record.kind != transport::RecordKind::kMessage) return;
  observe_payload(record.type, record.payload);
  if (record.replaced) observe_payload(record.type, *record.replaced);
}

// Payloads that fail to decode contribute nothing; the attacker can still
// see the raw bytes but they carry no structure to exploit.
void KnowledgeSet::observe_payload(MsgType type, ByteView payload) {
  try {
    switch (type) {
      case MsgType::kLaunchRequest: {
        auto m = msg::LaunchRequest::decode(payload);
        shares_.insert(m.dh_share);
        wrapped_.push_back(m.wrapped);
        for (const Page& p : m.image) plaintexts_.insert(p);
        break;
      }
      case MsgType::kLaunchReceipt:
        sealed_.push_back(msg::LaunchReceipt::decode(payload).sealed);
        break;
      case MsgType::kGuestSecret:
        sealed_.push_back(msg::GuestSecret::decode(payload).sealed);
        break;
      case MsgType::kExportBlob: {
        auto b = msg::ExportBlob::decode(payload);
        shares_.insert(b.dh_share);
        wrapped_.push_back(b.wrapped);
        sealed_.push_back(b.manifest);
        for (const auto& s : b.regions) sealed_.push_back(s);
        break;
      }
      case MsgType::kPlatformInfo: {
        auto p = msg::PlatformInfo::decode(payload);
        shares_.insert(p.pdh.public_key);
        break;
      }
      case MsgType::kExportRequest: {
        auto e = msg::ExportRequest::decode(payload);
        shares_.insert(e.target.pdh.public_key);
        break;
      }
      case MsgType::kDebugReadResponse:
        plaintexts_.insert(msg::DebugReadResponse::decode(payload).plaintext);
        break;
      default:
        break;
    }
  } catch (const Error&) {
  }
}

void KnowledgeSet::close() {
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<SymmetricKey, SymmetricKey>> wrap_keys;
    for (const auto& k : exchange_keys_) {
      for (const Bytes& share : shares_) {
        Key32 master;
        try {
          master = crypto::dh_shared(k, share);
        } catch (const Error&) {
          continue;
        }
        wrap_keys.emplace_back(SymmetricKey(KeyPurpose::kKek, crypto::kdf("SEV-KEK", {master})),
                               SymmetricKey(KeyPurpose::kKik, crypto::kdf("SEV-KIK", {master})));
      }
    }
    for (const auto& [kek, kik] : wrap_keys) {
      for (const auto& w : wrapped_) {
        try {
          auto [tek, tik] = crypto::unwrap_keys(w, kek, kik);
          grew |= transport_keys_.emplace(tek.bytes(), tik.bytes()).second;
        } catch (const Error&) {
        }
      }
    }
    for (const auto& [tek_bytes, tik_bytes] : transport_keys_) {
      SymmetricKey tek(KeyPurpose::kTek, tek_bytes);
      SymmetricKey tik(KeyPurpose::kTik, tik_bytes);
      for (const auto& s : sealed_) {
        try {
          grew |= plaintexts_.insert(msg::open_message(tek, tik, s)).second;
        } catch (const Error&) {
        }
      }
    }
  }
}

bool KnowledgeSet::knows_plaintext_containing(ByteView needle) const {
  return std::any_of(plaintexts_.begin(), plaintexts_.end(),
                     [&](const Bytes& p) { return contains(p, needle); });
}

bool KnowledgeSet::knows_key(ByteView key) const {
  for (const auto& [tek, tik] : transport_keys_) {
    if (std::equal(key.begin(), key.end(), tek.begin(), tek.end()) ||
        std::equal(key.begin(), key.end(), tik.begin(), tik.end())) {
      return true;
    }
  }
  return false;
}

std::string KnowledgeSet::summary() const {
  std::ostringstream os;
  os << "exchange_keys=" << exchange_keys_.size() << " shares=" << shares_.size()
     << " wrapped=" << wrapped_.size() << " sealed=" << sealed_.size()
     << " transport_keys=" << transport_keys_.size() << " plaintexts=" << plaintexts_.size();
  return os.str();
}

}  // namespace sevsim::knowledge
