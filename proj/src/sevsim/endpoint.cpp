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

#include "sevsim/endpoint.hpp"

namespace sevsim {

using msg::MsgType;

Reply error_reply(const Error& e) {
  msg::ErrorReply r{std::string(to_string(e.code())), e.what()};
  return {MsgType::kErrorReply, r.encode()};
}

std::optional<Reply> exchange(transport::Bus& bus, const transport::PartyId& from,
                              const transport::PartyId& to, HostEndpoint& host, MsgType type,
                              Bytes payload) {
  auto delivered = bus.send(from, to, type, std::move(payload));
  if (!delivered) return std::nullopt;
  Reply reply = host.handle(from, type, *delivered);
  auto back = bus.send(to, from, reply.type, std::move(reply.payload));
  if (!back) return std::nullopt;
  return Reply{reply.type, std::move(*back)};
}

Reply PlatformHost::handle(const transport::PartyId&, MsgType type, ByteView payload) {
  try {
    return dispatch(type, payload);
  } catch (const Error& e) {
    return error_reply(e);
  }
}

Reply PlatformHost::dispatch(MsgType type, ByteView payload) {
  switch (type) {
    case MsgType::kPlatformInfoRequest:
      return {MsgType::kPlatformInfo, platform_.platform_info().encode()};
    case MsgType::kLaunchRequest: {
      auto req = msg::LaunchRequest::decode(payload);
      msg::SessionId sid = platform_.open_channel_as_target(req.dh_share, req.wrapped);
      auto receipt = platform_.launch_guest(sid, std::move(req.image), req.policy, req.api_version);
      launch_sessions_[receipt.guest_id] = sid;
      return {MsgType::kLaunchReceipt, receipt.encode()};
    }
    case MsgType::kGuestSecret: {
      auto secret = msg::GuestSecret::decode(payload);
      auto it = launch_sessions_.find(secret.guest_id);
      if (it == launch_sessions_.end()) {
        throw Error(ErrorCode::kRejected, "no launch session for guest");
      }
      platform_.receive_secret(it->second, secret);
      return {MsgType::kAck, {}};
    }
    case MsgType::kExportRequest: {
      auto req = msg::ExportRequest::decode(payload);
      return {MsgType::kExportBlob, platform_.export_guest(req.guest_id, req.target).encode()};
    }
    case MsgType::kDebugReadRequest: {
      auto req = msg::DebugReadRequest::decode(payload);
      msg::DebugReadResponse resp{platform_.debug_read(req.guest_id, req.index)};
      return {MsgType::kDebugReadResponse, resp.encode()};
    }
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "unsupported request " + std::string(msg::to_string(type)));
  }
}

}  // namespace sevsim
