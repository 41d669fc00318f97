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

// Request/response plumbing between a client and whatever answers on a host:
// an honest SEV platform or an impostor.

#ifndef SEVSIM_ENDPOINT_HPP_
#define SEVSIM_ENDPOINT_HPP_

#include <map>
#include <optional>

#include "sevsim/messages.hpp"
#include "sevsim/platform.hpp"
#include "sevsim/transport.hpp"

namespace sevsim {

// Key server traffic does not transit the hypervisor.
inline constexpr char kKdsParty[] = "amd-kds";

struct Reply {
  msg::MsgType type = msg::MsgType::kAck;
  Bytes payload;
};

class HostEndpoint {
 public:
  virtual ~HostEndpoint() = default;
  virtual Reply handle(const transport::PartyId& from, msg::MsgType type, ByteView payload) = 0;
};

Reply error_reply(const Error& e);

// Sends the request over the bus, lets `host` answer the delivered bytes, and
// sends the answer back. nullopt if either leg was dropped.
std::optional<Reply> exchange(transport::Bus& bus, const transport::PartyId& from,
                              const transport::PartyId& to, HostEndpoint& host,
                              msg::MsgType type, Bytes payload);

// SEV API front-end of a real platform, as driven by the hypervisor.
class PlatformHost final : public HostEndpoint {
 public:
  explicit PlatformHost(psp::Platform& platform) : platform_(platform) {}

  Reply handle(const transport::PartyId& from, msg::MsgType type, ByteView payload) override;

 private:
  Reply dispatch(msg::MsgType type, ByteView payload);

  psp::Platform& platform_;
  std::map<msg::GuestId, msg::SessionId> launch_sessions_;
};

}  // namespace sevsim

#endif  // SEVSIM_ENDPOINT_HPP_
