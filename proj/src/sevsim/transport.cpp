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

#include "sevsim/transport.hpp"

#include <sstream>

namespace sevsim::transport {

std::optional<Bytes> Record::delivered() const {
  if (dropped) return std::nullopt;
  return replaced ? *replaced : payload;
}

std::string Record::render() const {
  std::ostringstream os;
  os << seq << ' ';
  switch (kind) {
    case RecordKind::kMessage:
    case RecordKind::kDirect:
      os << (kind == RecordKind::kMessage ? "MSG " : "DIRECT ") << from << ' ' << to << ' '
         << msg::to_string(type) << ' ' << (payload.empty() ? "-" : to_hex(payload));
      for (const std::string& a : annotations) os << " | " << a;
      if (replaced) os << " | replaced=" << (replaced->empty() ? "-" : to_hex(*replaced));
      if (dropped) os << " | dropped";
      break;
    case RecordKind::kStage:
      os << "STAGE " << from << ' ' << to << ' ' << text;
      break;
    case RecordKind::kNote:
      os << "NOTE " << from << ' ' << text;
      break;
  }
  return os.str();
}

void Bus::register_party(const PartyId& party) {
  if (party.empty() || party.find(' ') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "party ids must be non-empty and space-free");
  }
  parties_.insert(party);
}

void Bus::require_party(const PartyId& party) const {
  if (!has_party(party)) throw Error(ErrorCode::kUnknownParty, "unknown party '" + party + "'");
}

void Bus::attach_hook(AdversaryHook hook) { hooks_.push_back(std::move(hook)); }

std::optional<Bytes> Bus::send(const PartyId& from, const PartyId& to, MsgType type,
                               Bytes payload) {
  require_party(from);
  require_party(to);
  Record rec;
  rec.kind = RecordKind::kMessage;
  rec.seq = next_seq_++;
  rec.from = from;
  rec.to = to;
  rec.type = type;
  rec.payload = std::move(payload);

  Envelope env{rec.seq, from, to, type, rec.payload};
  for (const AdversaryHook& hook : hooks_) {
    auto it = hook.handlers.find(type);
    if (it == hook.handlers.end()) continue;
    HookAction action = it->second(env);
    std::string tag = "hook=" + hook.name;
    if (!action.note.empty()) tag += " " + action.note;
    rec.annotations.push_back(tag);
    // Passive hooks observe only; whatever they return is ignored.
    if (hook.mode == HookMode::kPassive) continue;
    if (action.kind == HookAction::Kind::kDrop) {
      rec.dropped = true;
      break;
    }
    if (action.kind == HookAction::Kind::kReplace) {
      env.payload = action.replacement;
      rec.replaced = std::move(action.replacement);
    }
  }
  records_.push_back(rec);
  return records_.back().delivered();
}

void Bus::log_direct(const PartyId& from, const PartyId& to, MsgType type, Bytes payload) {
  require_party(from);
  require_party(to);
  Record rec;
  rec.kind = RecordKind::kDirect;
  rec.seq = next_seq_++;
  rec.from = from;
  rec.to = to;
  rec.type = type;
  rec.payload = std::move(payload);
  records_.push_back(std::move(rec));
}

void Bus::record_stage(const PartyId& party, std::string_view stage, const std::string& detail) {
  Record rec;
  rec.kind = RecordKind::kStage;
  rec.seq = next_seq_++;
  rec.from = party;
  rec.to = std::string(stage);
  rec.text = detail;
  records_.push_back(std::move(rec));
}

void Bus::note(const PartyId& party, const std::string& text) {
  Record rec;
  rec.kind = RecordKind::kNote;
  rec.seq = next_seq_++;
  rec.from = party;
  rec.text = text;
  records_.push_back(std::move(rec));
}

std::string Bus::render() const {
  std::string out;
  for (const Record& r : records_) {
    out += r.render();
    out += '\n';
  }
  return out;
}

}  // namespace sevsim::transport
