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

// Semantic crypto primitives for the attestation model.
//
// Schemes: Ed25519 signatures, X25519 key exchange, SHA-256 digests,
// ChaCha20-Poly1305 (IETF) sealing. The kdf is a length-framed SHA-256 over
// an ascii label and an ordered input list. None of this is constant-time
// hardened beyond what libsodium provides.

#ifndef SEVSIM_CRYPTO_HPP_
#define SEVSIM_CRYPTO_HPP_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sevsim/core.hpp"

namespace sevsim::crypto {

inline constexpr std::size_t kKeySize = 32;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kPublicKeySize = 32;

using Nonce = std::array<std::uint8_t, kNonceSize>;

struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  ByteView view() const { return bytes; }
  std::string hex() const { return to_hex(bytes); }
  auto operator<=>(const Digest&) const = default;
};

struct SigningKeyPair {
  Bytes private_part;  // 64-byte Ed25519 secret (seed || public)
  Bytes public_part;   // 32-byte verification key

  // Deterministic: the same seed always yields the same key pair.
  static SigningKeyPair from_seed(const Key32& seed);
};

struct ExchangeKeyPair {
  Key32 private_part{};
  Bytes public_part;

  static ExchangeKeyPair from_seed(const Key32& seed);
};

enum class KeyPurpose : std::uint8_t { kKek = 1, kKik, kTek, kTik, kMem };

std::string_view to_string(KeyPurpose purpose);

class SymmetricKey {
 public:
  SymmetricKey(KeyPurpose purpose, ByteView bytes);
  SymmetricKey(KeyPurpose purpose, const Key32& bytes) : purpose_(purpose), bytes_(bytes) {}

  KeyPurpose purpose() const { return purpose_; }
  const Key32& bytes() const { return bytes_; }
  ByteView view() const { return bytes_; }

  bool operator==(const SymmetricKey&) const = default;

 private:
  KeyPurpose purpose_;
  Key32 bytes_;
};

struct WrappedKeys {
  Bytes ciphertext;
  Bytes mac;
  Nonce nonce{};

  bool operator==(const WrappedKeys&) const = default;
};

// 12-byte nonces: 4-byte domain tag followed by a 64-bit big-endian counter.
// Each party uses a distinct domain so nonces never repeat under one key.
class NonceCounter {
 public:
  explicit NonceCounter(std::uint32_t domain = 0) : domain_(domain) {}
  Nonce next();

 private:
  std::uint32_t domain_;
  std::uint64_t counter_ = 0;
};

// Deterministic entropy stream standing in for the PSP's "secure entropy
// source". Distinct (seed, stream) pairs yield independent sequences.
class EntropySource {
 public:
  EntropySource(std::uint64_t seed, std::string stream);

  Key32 next_key();
  Bytes next_bytes(std::size_t n);

 private:
  std::uint64_t seed_;
  std::string stream_;
  std::uint64_t counter_ = 0;
};

Bytes sign(const SigningKeyPair& key, ByteView message);

// Never throws; malformed keys or signatures simply fail verification.
bool verify(ByteView public_key, ByteView message, ByteView signature);

// X25519. Throws kMalformedInput for a share that is not 32 bytes or that
// yields the all-zero output.
Key32 dh_shared(const ExchangeKeyPair& own, ByteView peer_public);

// Label-separated, length-framed derivation. Throws kInvalidArgument on an
// empty label.
Key32 kdf(std::string_view label, std::span<const ByteView> inputs);
Key32 kdf(std::string_view label, std::initializer_list<ByteView> inputs);

Bytes encode_u32(std::uint32_t v);

WrappedKeys wrap_keys(const SymmetricKey& tek, const SymmetricKey& tik,
                      const SymmetricKey& kek, const SymmetricKey& kik, const Nonce& nonce);

// Throws kIntegrityFailure on any tampering or wrong key.
std::pair<SymmetricKey, SymmetricKey> unwrap_keys(const WrappedKeys& wrapped,
                                                  const SymmetricKey& kek,
                                                  const SymmetricKey& kik);

Bytes aead_seal(const SymmetricKey& key, const Nonce& nonce, ByteView plaintext, ByteView aad);

// Throws kIntegrityFailure if ciphertext, nonce or aad were modified.
Bytes aead_open(const SymmetricKey& key, const Nonce& nonce, ByteView ciphertext, ByteView aad);

Digest hash(ByteView data);

// Short printable key fingerprint for transcripts.
std::string fingerprint(ByteView public_key);

}  // namespace sevsim::crypto

#endif  // SEVSIM_CRYPTO_HPP_
