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

// Wire formats of every message that crosses the hypervisor-controlled bus.
// All encodings use ByteWriter framing; decode() throws kMalformedInput.

#ifndef SEVSIM_MESSAGES_HPP_
#define SEVSIM_MESSAGES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sevsim/certs.hpp"
#include "sevsim/core.hpp"
#include "sevsim/crypto.hpp"
#include "sevsim/policy.hpp"

namespace sevsim::msg {

using GuestId = std::uint32_t;
using SessionId = std::uint32_t;

enum class MsgType : std::uint8_t {
  kPlatformInfoRequest = 1,
  kPlatformInfo,
  kLaunchRequest,
  kLaunchReceipt,
  kGuestSecret,
  kAck,
  kErrorReply,
  kExportRequest,
  kExportBlob,
  kDebugReadRequest,
  kDebugReadResponse,
  kKdsRequest,
  kKdsResponse,
};

std::string_view to_string(MsgType type);
MsgType msg_type_from_string(std::string_view text);

// AEAD payload under a session's TEK. The aad is kdf("SEV-AAD", [TIK, context]),
// so opening requires both transport keys and the exact public context.
struct SealedMessage {
  crypto::Nonce nonce{};
  std::string context;
  Bytes ciphertext;

  void write(ByteWriter& w) const;
  static SealedMessage read(ByteReader& r);
  bool operator==(const SealedMessage&) const = default;
};

SealedMessage seal_message(const crypto::SymmetricKey& tek, const crypto::SymmetricKey& tik,
                           const crypto::Nonce& nonce, std::string context, ByteView plaintext);
// Throws kIntegrityFailure.
Bytes open_message(const crypto::SymmetricKey& tek, const crypto::SymmetricKey& tik,
                   const SealedMessage& sealed);

std::string receipt_context(GuestId guest);
std::string secret_context(GuestId guest);
std::string manifest_context();
std::string region_context(std::uint32_t index);

struct PlatformInfo {
  certs::Certificate pdh;
  certs::Certificate pek;
  certs::PlatformId platform_id{};
  std::optional<certs::VersionInfo> versions;  // reported by enhanced firmware
  std::uint32_t api_version = 0;

  Bytes encode() const;
  static PlatformInfo decode(ByteView in);
};

struct LaunchRequest {
  Bytes dh_share;
  crypto::WrappedKeys wrapped;
  GuestPolicy policy;
  std::uint32_t api_version = 0;
  std::vector<Page> image;

  Bytes encode() const;
  static LaunchRequest decode(ByteView in);
};

struct ReceiptBody {
  crypto::Digest measurement;
  GuestPolicy policy;
  std::uint32_t api_version = 0;

  Bytes encode() const;
  static ReceiptBody decode(ByteView in);
};

struct LaunchReceipt {
  GuestId guest_id = 0;
  SealedMessage sealed;

  Bytes encode() const;
  static LaunchReceipt decode(ByteView in);
};

struct GuestSecret {
  GuestId guest_id = 0;
  SealedMessage sealed;

  Bytes encode() const;
  static GuestSecret decode(ByteView in);
};

struct ErrorReply {
  std::string code;
  std::string message;

  Bytes encode() const;
  static ErrorReply decode(ByteView in);
};

struct ExportRequest {
  GuestId guest_id = 0;
  certs::ChainBundle target;

  Bytes encode() const;
  static ExportRequest decode(ByteView in);
};

struct ManifestBody {
  GuestPolicy policy;
  std::uint32_t api_version = 0;
  crypto::Digest measurement;
  std::uint32_t image_pages = 0;
  std::uint32_t region_count = 0;

  Bytes encode() const;
  static ManifestBody decode(ByteView in);
};

struct ExportBlob {
  Bytes dh_share;
  crypto::WrappedKeys wrapped;
  SealedMessage manifest;
  std::vector<SealedMessage> regions;

  Bytes encode() const;
  static ExportBlob decode(ByteView in);
  bool operator==(const ExportBlob&) const = default;
};

struct DebugReadRequest {
  GuestId guest_id = 0;
  std::uint32_t index = 0;

  Bytes encode() const;
  static DebugReadRequest decode(ByteView in);
};

struct DebugReadResponse {
  Bytes plaintext;

  Bytes encode() const;
  static DebugReadResponse decode(ByteView in);
};

struct KdsRequest {
  certs::PlatformId platform_id{};
  std::optional<certs::VersionInfo> versions;
  bool roots = false;  // ARK/ASK fetch instead of a CEK query

  Bytes encode() const;
};

void write_wrapped(ByteWriter& w, const crypto::WrappedKeys& wrapped);
crypto::WrappedKeys read_wrapped(ByteReader& r);

}  // namespace sevsim::msg

#endif  // SEVSIM_MESSAGES_HPP_
