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

#include "sevsim/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace sevsim::crypto {
namespace {

// RFC 3394 default integrity check value, appended to TEK||TIK before
// encryption so that a wrong KEK is detected even when the MAC verifies.
constexpr std::array<std::uint8_t, 8> kWrapIcv = {0xA6, 0xA6, 0xA6, 0xA6,
                                                  0xA6, 0xA6, 0xA6, 0xA6};
constexpr std::size_t kWrappedPlainSize = 2 * kKeySize + kWrapIcv.size();

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  }
};

void ensure_sodium() { static const SodiumInit init; }

void require_purpose(const SymmetricKey& key, KeyPurpose expected) {
  if (key.purpose() != expected) {
    throw Error(ErrorCode::kInvalidArgument,
                "key purpose " + std::string(to_string(key.purpose())) + " used where " +
                    std::string(to_string(expected)) + " is required");
  }
}

std::array<std::uint8_t, crypto_auth_hmacsha256_BYTES> wrap_mac(const SymmetricKey& kik,
                                                                 const Nonce& nonce,
                                                                 ByteView ciphertext) {
  std::array<std::uint8_t, crypto_auth_hmacsha256_BYTES> mac{};
  crypto_auth_hmacsha256_state st;
  crypto_auth_hmacsha256_init(&st, kik.bytes().data(), kik.bytes().size());
  crypto_auth_hmacsha256_update(&st, nonce.data(), nonce.size());
  crypto_auth_hmacsha256_update(&st, ciphertext.data(), ciphertext.size());
  crypto_auth_hmacsha256_final(&st, mac.data());
  return mac;
}

}  // namespace

std::string_view to_string(KeyPurpose purpose) {
  switch (purpose) {
    case KeyPurpose::kKek: return "KEK";
    case KeyPurpose::kKik: return "KIK";
    case KeyPurpose::kTek: return "TEK";
    case KeyPurpose::kTik: return "TIK";
    case KeyPurpose::kMem: return "MEM";
  }
  return "?";
}

SymmetricKey::SymmetricKey(KeyPurpose purpose, ByteView bytes) : purpose_(purpose) {
  if (bytes.size() != kKeySize) {
    throw Error(ErrorCode::kInvalidArgument, "symmetric keys are exactly 32 bytes");
  }
  std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

SigningKeyPair SigningKeyPair::from_seed(const Key32& seed) {
  ensure_sodium();
  SigningKeyPair kp;
  kp.private_part.resize(crypto_sign_SECRETKEYBYTES);
  kp.public_part.resize(crypto_sign_PUBLICKEYBYTES);
  crypto_sign_seed_keypair(kp.public_part.data(), kp.private_part.data(), seed.data());
  return kp;
}

ExchangeKeyPair ExchangeKeyPair::from_seed(const Key32& seed) {
  ensure_sodium();
  ExchangeKeyPair kp;
  kp.private_part = seed;
  kp.public_part.resize(crypto_scalarmult_BYTES);
  crypto_scalarmult_base(kp.public_part.data(), kp.private_part.data());
  return kp;
}

Nonce NonceCounter::next() {
  Nonce n{};
  ByteWriter w;
  w.u32(domain_).u64(counter_++);
  std::copy(w.data().begin(), w.data().end(), n.begin());
  return n;
}

EntropySource::EntropySource(std::uint64_t seed, std::string stream)
    : seed_(seed), stream_(std::move(stream)) {}

Key32 EntropySource::next_key() {
  ByteWriter seed;
  seed.u64(seed_);
  ByteWriter ctr;
  ctr.u64(counter_++);
  return kdf("SEVSIM-ENTROPY", {seed.data(), as_bytes(stream_), ctr.data()});
}

Bytes EntropySource::next_bytes(std::size_t n) {
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    Key32 block = next_key();
    std::size_t take = std::min(block.size(), n - out.size());
    out.insert(out.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

Bytes sign(const SigningKeyPair& key, ByteView message) {
  ensure_sodium();
  if (key.private_part.size() != crypto_sign_SECRETKEYBYTES) {
    throw Error(ErrorCode::kInvalidArgument, "malformed signing key");
  }
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                       key.private_part.data());
  return sig;
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
  ensure_sodium();
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES) {
    return false;
  }
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

Key32 dh_shared(const ExchangeKeyPair& own, ByteView peer_public) {
  ensure_sodium();
  if (peer_public.size() != crypto_scalarmult_BYTES) {
    throw Error(ErrorCode::kMalformedInput, "key-exchange share must be 32 bytes");
  }
  Key32 out{};
  if (crypto_scalarmult(out.data(), own.private_part.data(), peer_public.data()) != 0) {
    throw Error(ErrorCode::kMalformedInput, "degenerate key-exchange share");
  }
  return out;
}

Key32 kdf(std::string_view label, std::span<const ByteView> inputs) {
  ensure_sodium();
  if (label.empty()) throw Error(ErrorCode::kInvalidArgument, "kdf label must be non-empty");
  ByteWriter framed;
  framed.str(label).u32(static_cast<std::uint32_t>(inputs.size()));
  for (ByteView in : inputs) framed.bytes(in);
  Key32 out{};
  crypto_hash_sha256(out.data(), framed.data().data(), framed.data().size());
  return out;
}

Key32 kdf(std::string_view label, std::initializer_list<ByteView> inputs) {
  return kdf(label, std::span<const ByteView>(inputs.begin(), inputs.size()));
}

Bytes encode_u32(std::uint32_t v) { return ByteWriter().u32(v).take(); }

WrappedKeys wrap_keys(const SymmetricKey& tek, const SymmetricKey& tik,
                      const SymmetricKey& kek, const SymmetricKey& kik, const Nonce& nonce) {
  ensure_sodium();
  require_purpose(tek, KeyPurpose::kTek);
  require_purpose(tik, KeyPurpose::kTik);
  require_purpose(kek, KeyPurpose::kKek);
  require_purpose(kik, KeyPurpose::kKik);

  Bytes plain = concat({tek.view(), tik.view(), kWrapIcv});
  WrappedKeys out;
  out.nonce = nonce;
  out.ciphertext.resize(plain.size());
  crypto_stream_chacha20_ietf_xor(out.ciphertext.data(), plain.data(), plain.size(),
                                  nonce.data(), kek.bytes().data());
  sodium_memzero(plain.data(), plain.size());
  auto mac = wrap_mac(kik, nonce, out.ciphertext);
  out.mac.assign(mac.begin(), mac.end());
  return out;
}

std::pair<SymmetricKey, SymmetricKey> unwrap_keys(const WrappedKeys& wrapped,
                                                  const SymmetricKey& kek,
                                                  const SymmetricKey& kik) {
  ensure_sodium();
  require_purpose(kek, KeyPurpose::kKek);
  require_purpose(kik, KeyPurpose::kKik);
  if (wrapped.ciphertext.size() != kWrappedPlainSize ||
      wrapped.mac.size() != crypto_auth_hmacsha256_BYTES) {
    throw Error(ErrorCode::kIntegrityFailure, "wrapped keys have the wrong shape");
  }
  auto expected = wrap_mac(kik, wrapped.nonce, wrapped.ciphertext);
  if (sodium_memcmp(expected.data(), wrapped.mac.data(), expected.size()) != 0) {
    throw Error(ErrorCode::kIntegrityFailure, "wrapped keys failed integrity check");
  }
  Bytes plain(kWrappedPlainSize);
  crypto_stream_chacha20_ietf_xor(plain.data(), wrapped.ciphertext.data(),
                                  wrapped.ciphertext.size(), wrapped.nonce.data(),
                                  kek.bytes().data());
  if (sodium_memcmp(plain.data() + 2 * kKeySize, kWrapIcv.data(), kWrapIcv.size()) != 0) {
    sodium_memzero(plain.data(), plain.size());
    throw Error(ErrorCode::kIntegrityFailure, "wrapped keys failed decryption check");
  }
  SymmetricKey tek(KeyPurpose::kTek, ByteView(plain).subspan(0, kKeySize));
  SymmetricKey tik(KeyPurpose::kTik, ByteView(plain).subspan(kKeySize, kKeySize));
  sodium_memzero(plain.data(), plain.size());
  return {tek, tik};
}

Bytes aead_seal(const SymmetricKey& key, const Nonce& nonce, ByteView plaintext, ByteView aad) {
  ensure_sodium();
  Bytes out(plaintext.size() + crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long out_len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(out.data(), &out_len, plaintext.data(),
                                            plaintext.size(), aad.data(), aad.size(), nullptr,
                                            nonce.data(), key.bytes().data());
  out.resize(static_cast<std::size_t>(out_len));
  return out;
}

Bytes aead_open(const SymmetricKey& key, const Nonce& nonce, ByteView ciphertext, ByteView aad) {
  ensure_sodium();
  if (ciphertext.size() < crypto_aead_chacha20poly1305_ietf_ABYTES) {
    throw Error(ErrorCode::kIntegrityFailure, "sealed message too short");
  }
  Bytes out(ciphertext.size() - crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long out_len = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &out_len, nullptr,
                                                ciphertext.data(), ciphertext.size(),
                                                aad.data(), aad.size(), nonce.data(),
                                                key.bytes().data()) != 0) {
    throw Error(ErrorCode::kIntegrityFailure, "sealed message failed authentication");
  }
  out.resize(static_cast<std::size_t>(out_len));
  return out;
}

Digest hash(ByteView data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

std::string fingerprint(ByteView public_key) {
  Digest d = hash(public_key);
  return to_hex(ByteView(d.bytes).subspan(0, 6));
}

}  // namespace sevsim::crypto
