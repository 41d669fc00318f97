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

#ifndef SEVSIM_CORE_HPP_
#define SEVSIM_CORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sevsim {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Key32 = std::array<std::uint8_t, 32>;

enum class Design : std::uint8_t { kBaseline = 0, kEnhanced = 1 };

std::string_view to_string(Design design);
Design design_from_string(std::string_view text);

enum class ErrorCode {
  kInvalidArgument,
  kMalformedInput,
  kIntegrityFailure,
  kNotFound,
  kRevoked,
  kImpermissibleIssuer,
  kCapabilityDenied,
  kNotBooted,
  kNotInitialized,
  kRejected,
  kChannelRejected,
  kNoSession,
  kPolicyDenied,
  kTargetRejected,
  kTargetVersionDenied,
  kImportRejected,
  kUnknownParty,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the simulator surface as this exception type;
// the C API maps `code()` onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view text) {
  return {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()};
}

inline Bytes to_bytes(ByteView view) { return Bytes(view.begin(), view.end()); }

Bytes concat(std::initializer_list<ByteView> parts);

// Returns true if `needle` occurs anywhere inside `haystack`.
bool contains(ByteView haystack, ByteView needle);

// Canonical encoder: fixed-width big-endian integers and u32 length-prefixed
// byte strings.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
  ByteWriter& bytes(ByteView v);
  ByteWriter& str(std::string_view v) { return bytes(as_bytes(v)); }
  ByteWriter& raw(ByteView v);

  const Bytes& data() const& { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Decoder for ByteWriter output. Every read failure throws kMalformedInput.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  bool boolean();
  Bytes bytes();
  std::string str();
  Key32 key32();
  void raw(std::span<std::uint8_t> out);

  bool at_end() const { return pos_ == in_.size(); }
  void expect_end() const;

 private:
  ByteView take(std::size_t n);

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace sevsim

#endif  // SEVSIM_CORE_HPP_
