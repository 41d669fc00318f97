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

// The hypervisor-controlled message bus. Every owner <-> firmware and
// firmware <-> firmware message goes through send(); adversary hooks see each
// envelope in attachment order and (when active) may replace or drop it.
//
// The transcript is append-only. Text form, one record per line:
//
//   <seq> MSG <from> <to> <Type> <payload-hex>[ | <annotation>]...
//   <seq> DIRECT <from> <to> <Type> <payload-hex>
//   <seq> STAGE <party> <stage> <detail>
//   <seq> NOTE <party> <text>

#ifndef SEVSIM_TRANSPORT_HPP_
#define SEVSIM_TRANSPORT_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sevsim/core.hpp"
#include "sevsim/messages.hpp"

namespace sevsim::transport {

using PartyId = std::string;
using msg::MsgType;

struct Envelope {
  std::uint64_t seq = 0;
  PartyId from;
  PartyId to;
  MsgType type = MsgType::kAck;
  Bytes payload;
};

enum class HookMode { kPassive, kActive };

struct HookAction {
  enum class Kind { kPass, kReplace, kDrop };

  Kind kind = Kind::kPass;
  Bytes replacement;
  std::string note;

  static HookAction pass(std::string note = {}) { return {Kind::kPass, {}, std::move(note)}; }
  static HookAction replace(Bytes payload, std::string note = {}) {
    return {Kind::kReplace, std::move(payload), std::move(note)};
  }
  static HookAction drop(std::string note = {}) { return {Kind::kDrop, {}, std::move(note)}; }
};

using HookHandler = std::function<HookAction(const Envelope&)>;

struct AdversaryHook {
  std::string name;
  HookMode mode = HookMode::kPassive;
  std::map<MsgType, HookHandler> handlers;
};

enum class RecordKind { kMessage, kDirect, kStage, kNote };

struct Record {
  RecordKind kind = RecordKind::kMessage;
  std::uint64_t seq = 0;
  PartyId from;  // party for STAGE / NOTE
  PartyId to;    // stage name for STAGE
  MsgType type = MsgType::kAck;
  Bytes payload;                  // as sent
  std::optional<Bytes> replaced;  // set when an active hook substituted it
  bool dropped = false;
  std::vector<std::string> annotations;
  std::string text;  // STAGE detail / NOTE text

  // Payload that actually reached `to` (nullopt when dropped).
  std::optional<Bytes> delivered() const;
  std::string render() const;
};

class Bus {
 public:
  void register_party(const PartyId& party);
  bool has_party(const PartyId& party) const { return parties_.count(party) != 0; }

  void attach_hook(AdversaryHook hook);

  // Returns the payload delivered to `to`, or nullopt when a hook dropped it.
  // Throws kUnknownParty for unregistered endpoints.
  std::optional<Bytes> send(const PartyId& from, const PartyId& to, MsgType type, Bytes payload);

  // Traffic on a channel the hypervisor does not carry (key server queries).
  void log_direct(const PartyId& from, const PartyId& to, MsgType type, Bytes payload);

  void record_stage(const PartyId& party, std::string_view stage, const std::string& detail);
  void note(const PartyId& party, const std::string& text);

  const std::vector<Record>& transcript() const { return records_; }
  std::string render() const;

 private:
  void require_party(const PartyId& party) const;

  std::set<PartyId> parties_;
  std::vector<AdversaryHook> hooks_;
  std::vector<Record> records_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace sevsim::transport

#endif  // SEVSIM_TRANSPORT_HPP_
