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

#include "sevsim/core.hpp"

#include <algorithm>
#include <cstring>

namespace sevsim {

std::string_view to_string(Design design) {
  return design == Design::kEnhanced ? "enhanced" : "baseline";
}

Design design_from_string(std::string_view text) {
  if (text == "baseline") return Design::kBaseline;
  if (text == "enhanced") return Design::kEnhanced;
  throw Error(ErrorCode::kConfig,
              "design must be 'baseline' or 'enhanced', got '" + std::string(text) + "'");
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedInput: return "MalformedInput";
    case ErrorCode::kIntegrityFailure: return "IntegrityFailure";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kRevoked: return "Revoked";
    case ErrorCode::kImpermissibleIssuer: return "ImpermissibleIssuer";
    case ErrorCode::kCapabilityDenied: return "CapabilityDenied";
    case ErrorCode::kNotBooted: return "NotBooted";
    case ErrorCode::kNotInitialized: return "NotInitialized";
    case ErrorCode::kRejected: return "Rejected";
    case ErrorCode::kChannelRejected: return "ChannelRejected";
    case ErrorCode::kNoSession: return "NoSession";
    case ErrorCode::kPolicyDenied: return "PolicyDenied";
    case ErrorCode::kTargetRejected: return "TargetRejected";
    case ErrorCode::kTargetVersionDenied: return "TargetVersionDenied";
    case ErrorCode::kImportRejected: return "ImportRejected";
    case ErrorCode::kUnknownParty: return "UnknownParty";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kMalformedInput, "hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kMalformedInput, "invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Bytes concat(std::initializer_list<ByteView> parts) {
  Bytes out;
  for (ByteView p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::bytes(ByteView v) {
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

ByteWriter& ByteWriter::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteView ByteReader::take(std::size_t n) {
  if (in_.size() - pos_ < n) {
    throw Error(ErrorCode::kMalformedInput, "truncated input");
  }
  ByteView out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint32_t ByteReader::u32() {
  ByteView b = take(4);
  std::uint32_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t ByteReader::u64() {
  ByteView b = take(8);
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

bool ByteReader::boolean() {
  std::uint8_t v = u8();
  if (v > 1) throw Error(ErrorCode::kMalformedInput, "boolean out of range");
  return v == 1;
}

Bytes ByteReader::bytes() {
  std::uint32_t n = u32();
  return to_bytes(take(n));
}

std::string ByteReader::str() {
  ByteView b = take(u32());
  return std::string(b.begin(), b.end());
}

Key32 ByteReader::key32() {
  Bytes b = bytes();
  if (b.size() != 32) throw Error(ErrorCode::kMalformedInput, "expected 32-byte field");
  Key32 out;
  std::memcpy(out.data(), b.data(), out.size());
  return out;
}

void ByteReader::raw(std::span<std::uint8_t> out) {
  ByteView b = take(out.size());
  std::copy(b.begin(), b.end(), out.begin());
}

void ByteReader::expect_end() const {
  if (!at_end()) throw Error(ErrorCode::kMalformedInput, "trailing bytes");
}

}  // namespace sevsim
