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

#include "sevsim/messages.hpp"

#include <algorithm>

namespace sevsim::msg {
namespace {

constexpr std::uint32_t kMaxPages = 1u << 16;

struct TypeName {
  MsgType type;
  std::string_view name;
};

constexpr TypeName kTypeNames[] = {
    {MsgType::kPlatformInfoRequest, "PlatformInfoRequest"},
    {MsgType::kPlatformInfo, "PlatformInfo"},
    {MsgType::kLaunchRequest, "LaunchRequest"},
    {MsgType::kLaunchReceipt, "LaunchReceipt"},
    {MsgType::kGuestSecret, "GuestSecret"},
    {MsgType::kAck, "Ack"},
    {MsgType::kErrorReply, "ErrorReply"},
    {MsgType::kExportRequest, "ExportRequest"},
    {MsgType::kExportBlob, "ExportBlob"},
    {MsgType::kDebugReadRequest, "DebugReadRequest"},
    {MsgType::kDebugReadResponse, "DebugReadResponse"},
    {MsgType::kKdsRequest, "KdsRequest"},
    {MsgType::kKdsResponse, "KdsResponse"},
};

void write_digest(ByteWriter& w, const crypto::Digest& d) { w.bytes(d.bytes); }

crypto::Digest read_digest(ByteReader& r) {
  crypto::Digest d;
  d.bytes = r.key32();
  return d;
}

void write_versions(ByteWriter& w, const std::optional<certs::VersionInfo>& v) {
  w.boolean(v.has_value());
  if (v) w.u32(v->psp_os_version).u32(v->sev_fw_version);
}

std::optional<certs::VersionInfo> read_versions(ByteReader& r) {
  if (!r.boolean()) return std::nullopt;
  certs::VersionInfo v;
  v.psp_os_version = r.u32();
  v.sev_fw_version = r.u32();
  return v;
}

crypto::SymmetricKey aad_key_guard(const crypto::SymmetricKey& tek) {
  if (tek.purpose() != crypto::KeyPurpose::kTek) {
    throw Error(ErrorCode::kInvalidArgument, "sealed messages use the TEK");
  }
  return tek;
}

Bytes aad_for(const crypto::SymmetricKey& tik, std::string_view context) {
  if (tik.purpose() != crypto::KeyPurpose::kTik) {
    throw Error(ErrorCode::kInvalidArgument, "sealed message aad derives from the TIK");
  }
  Key32 aad = crypto::kdf("SEV-AAD", {tik.view(), as_bytes(context)});
  return Bytes(aad.begin(), aad.end());
}

}  // namespace

std::string_view to_string(MsgType type) {
  for (const auto& tn : kTypeNames) {
    if (tn.type == type) return tn.name;
  }
  return "?";
}

MsgType msg_type_from_string(std::string_view text) {
  for (const auto& tn : kTypeNames) {
    if (tn.name == text) return tn.type;
  }
  throw Error(ErrorCode::kMalformedInput, "unknown message type '" + std::string(text) + "'");
}

void SealedMessage::write(ByteWriter& w) const {
  w.raw(nonce).str(context).bytes(ciphertext);
}

SealedMessage SealedMessage::read(ByteReader& r) {
  SealedMessage s;
  r.raw(s.nonce);
  s.context = r.str();
  s.ciphertext = r.bytes();
  return s;
}

SealedMessage seal_message(const crypto::SymmetricKey& tek, const crypto::SymmetricKey& tik,
                           const crypto::Nonce& nonce, std::string context, ByteView plaintext) {
  SealedMessage s;
  s.nonce = nonce;
  s.ciphertext = crypto::aead_seal(aad_key_guard(tek), nonce, plaintext, aad_for(tik, context));
  s.context = std::move(context);
  return s;
}

Bytes open_message(const crypto::SymmetricKey& tek, const crypto::SymmetricKey& tik,
                   const SealedMessage& sealed) {
  return crypto::aead_open(aad_key_guard(tek), sealed.nonce, sealed.ciphertext,
                           aad_for(tik, sealed.context));
}

std::string receipt_context(GuestId guest) { return "launch-receipt:guest=" + std::to_string(guest); }
std::string secret_context(GuestId guest) { return "guest-secret:guest=" + std::to_string(guest); }
std::string manifest_context() { return "export-manifest"; }
std::string region_context(std::uint32_t index) { return "export-region:" + std::to_string(index); }

void write_wrapped(ByteWriter& w, const crypto::WrappedKeys& wrapped) {
  w.raw(wrapped.nonce).bytes(wrapped.ciphertext).bytes(wrapped.mac);
}

crypto::WrappedKeys read_wrapped(ByteReader& r) {
  crypto::WrappedKeys out;
  r.raw(out.nonce);
  out.ciphertext = r.bytes();
  out.mac = r.bytes();
  return out;
}

Bytes PlatformInfo::encode() const {
  ByteWriter w;
  w.bytes(pdh.serialize()).bytes(pek.serialize()).bytes(platform_id);
  write_versions(w, versions);
  w.u32(api_version);
  return std::move(w).take();
}

PlatformInfo PlatformInfo::decode(ByteView in) {
  ByteReader r(in);
  PlatformInfo p;
  p.pdh = certs::Certificate::deserialize(r.bytes());
  p.pek = certs::Certificate::deserialize(r.bytes());
  p.platform_id = r.key32();
  p.versions = read_versions(r);
  p.api_version = r.u32();
  r.expect_end();
  return p;
}

Bytes LaunchRequest::encode() const {
  ByteWriter w;
  w.bytes(dh_share);
  write_wrapped(w, wrapped);
  w.bytes(policy.encode()).u32(api_version).u32(static_cast<std::uint32_t>(image.size()));
  for (const Page& p : image) w.bytes(p);
  return std::move(w).take();
}

LaunchRequest LaunchRequest::decode(ByteView in) {
  ByteReader r(in);
  LaunchRequest l;
  l.dh_share = r.bytes();
  l.wrapped = read_wrapped(r);
  l.policy = GuestPolicy::decode(r.bytes());
  l.api_version = r.u32();
  std::uint32_t n = r.u32();
  if (n > kMaxPages) throw Error(ErrorCode::kMalformedInput, "too many pages");
  for (std::uint32_t i = 0; i < n; ++i) l.image.push_back(r.bytes());
  r.expect_end();
  return l;
}

Bytes ReceiptBody::encode() const {
  ByteWriter w;
  write_digest(w, measurement);
  w.bytes(policy.encode()).u32(api_version);
  return std::move(w).take();
}

ReceiptBody ReceiptBody::decode(ByteView in) {
  ByteReader r(in);
  ReceiptBody b;
  b.measurement = read_digest(r);
  b.policy = GuestPolicy::decode(r.bytes());
  b.api_version = r.u32();
  r.expect_end();
  return b;
}

Bytes LaunchReceipt::encode() const {
  ByteWriter w;
  w.u32(guest_id);
  sealed.write(w);
  return std::move(w).take();
}

LaunchReceipt LaunchReceipt::decode(ByteView in) {
  ByteReader r(in);
  LaunchReceipt l;
  l.guest_id = r.u32();
  l.sealed = SealedMessage::read(r);
  r.expect_end();
  return l;
}

Bytes GuestSecret::encode() const {
  ByteWriter w;
  w.u32(guest_id);
  sealed.write(w);
  return std::move(w).take();
}

GuestSecret GuestSecret::decode(ByteView in) {
  ByteReader r(in);
  GuestSecret g;
  g.guest_id = r.u32();
  g.sealed = SealedMessage::read(r);
  r.expect_end();
  return g;
}

Bytes ErrorReply::encode() const {
  return ByteWriter().str(code).str(message).take();
}

ErrorReply ErrorReply::decode(ByteView in) {
  ByteReader r(in);
  ErrorReply e;
  e.code = r.str();
  e.message = r.str();
  r.expect_end();
  return e;
}

Bytes ExportRequest::encode() const {
  return ByteWriter().u32(guest_id).bytes(target.serialize()).take();
}

ExportRequest ExportRequest::decode(ByteView in) {
  ByteReader r(in);
  ExportRequest e;
  e.guest_id = r.u32();
  e.target = certs::ChainBundle::deserialize(r.bytes());
  r.expect_end();
  return e;
}

Bytes ManifestBody::encode() const {
  ByteWriter w;
  w.bytes(policy.encode()).u32(api_version);
  write_digest(w, measurement);
  w.u32(image_pages).u32(region_count);
  return std::move(w).take();
}

ManifestBody ManifestBody::decode(ByteView in) {
  ByteReader r(in);
  ManifestBody m;
  m.policy = GuestPolicy::decode(r.bytes());
  m.api_version = r.u32();
  m.measurement = read_digest(r);
  m.image_pages = r.u32();
  m.region_count = r.u32();
  r.expect_end();
  return m;
}

Bytes ExportBlob::encode() const {
  ByteWriter w;
  w.bytes(dh_share);
  write_wrapped(w, wrapped);
  manifest.write(w);
  w.u32(static_cast<std::uint32_t>(regions.size()));
  for (const SealedMessage& s : regions) s.write(w);
  return std::move(w).take();
}

ExportBlob ExportBlob::decode(ByteView in) {
  ByteReader r(in);
  ExportBlob b;
  b.dh_share = r.bytes();
  b.wrapped = read_wrapped(r);
  b.manifest = SealedMessage::read(r);
  std::uint32_t n = r.u32();
  if (n > kMaxPages) throw Error(ErrorCode::kMalformedInput, "too many regions");
  for (std::uint32_t i = 0; i < n; ++i) b.regions.push_back(SealedMessage::read(r));
  r.expect_end();
  return b;
}

Bytes DebugReadRequest::encode() const { return ByteWriter().u32(guest_id).u32(index).take(); }

DebugReadRequest DebugReadRequest::decode(ByteView in) {
  ByteReader r(in);
  DebugReadRequest d;
  d.guest_id = r.u32();
  d.index = r.u32();
  r.expect_end();
  return d;
}

Bytes DebugReadResponse::encode() const { return ByteWriter().bytes(plaintext).take(); }

DebugReadResponse DebugReadResponse::decode(ByteView in) {
  ByteReader r(in);
  DebugReadResponse d;
  d.plaintext = r.bytes();
  r.expect_end();
  return d;
}

Bytes KdsRequest::encode() const {
  ByteWriter w;
  w.boolean(roots).bytes(platform_id);
  write_versions(w, versions);
  return std::move(w).take();
}

}  // namespace sevsim::msg
