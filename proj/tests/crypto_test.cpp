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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracle_vectors.hpp"
#include "sevsim/crypto.hpp"
#include "test_world.hpp"

namespace {

using namespace sevsim;
using namespace sevsim::crypto;
using testworld::filled;

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

Key32 random_key(std::mt19937_64& rng) {
  Key32 k;
  for (auto& x : k) x = static_cast<std::uint8_t>(rng());
  return k;
}

Bytes flip(Bytes b, std::size_t bit) {
  b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
  return b;
}

SymmetricKey sym(KeyPurpose p, std::uint8_t fill) { return {p, filled(fill)}; }

// --- golden values from the Python oracle ----------------------------------

TEST(CryptoOracle, Sha256Goldens) {
  EXPECT_EQ(hash({}).hex(), oracle::kSha256Empty);
  EXPECT_EQ(hash(as_bytes("abc")).hex(), oracle::kSha256Abc);
}

TEST(CryptoOracle, KdfFraming) {
  const Key32 ms = filled(0x01);
  EXPECT_EQ(to_hex(kdf("SEV-KEK", {ms})), oracle::kKdfKek);
  EXPECT_EQ(to_hex(kdf("SEV-KIK", {ms})), oracle::kKdfKik);
  EXPECT_EQ(to_hex(kdf("X", std::span<const ByteView>{})), oracle::kKdfEmptyInputs);
}

TEST(CryptoOracle, TwoStageDerivation) {
  const Key32 s = filled(0x42);
  Key32 psp1 = kdf("S_PSP", {encode_u32(1), s});
  Key32 psp2 = kdf("S_PSP", {encode_u32(2), s});
  EXPECT_EQ(to_hex(psp1), oracle::kSPspPv1);
  EXPECT_EQ(to_hex(psp2), oracle::kSPspPv2);
  EXPECT_NE(psp1, psp2);
  EXPECT_EQ(to_hex(kdf("S_CEK", {encode_u32(3), psp2})), oracle::kSCekPv2Sv3);
}

TEST(CryptoOracle, Curve25519Vectors) {
  auto a = ExchangeKeyPair::from_seed(filled(0x11));
  auto b = ExchangeKeyPair::from_seed(filled(0x22));
  EXPECT_EQ(to_hex(a.public_part), oracle::kXPubA);
  EXPECT_EQ(to_hex(b.public_part), oracle::kXPubB);
  EXPECT_EQ(to_hex(dh_shared(a, b.public_part)), oracle::kXShared);
  EXPECT_EQ(to_hex(SigningKeyPair::from_seed(filled(0x11)).public_part), oracle::kEdPubA);
}

// --- sign / verify ----------------------------------------------------------

TEST(Sign, RoundTripForgeryAndWrongKey) {
  auto k = SigningKeyPair::from_seed(filled(1));
  auto k2 = SigningKeyPair::from_seed(filled(2));
  const Bytes m = to_bytes(as_bytes("launch"));
  Bytes sig = sign(k, m);
  EXPECT_EQ(sig.size(), kSignatureSize);
  EXPECT_TRUE(verify(k.public_part, m, sig));
  EXPECT_FALSE(verify(k.public_part, as_bytes("launcH"), sig));
  EXPECT_FALSE(verify(k2.public_part, m, sig));
}

TEST(Sign, EmptyMessageAndFlippedSignature) {
  auto k = SigningKeyPair::from_seed(filled(3));
  Bytes sig = sign(k, {});
  EXPECT_TRUE(verify(k.public_part, {}, sig));
  EXPECT_FALSE(verify(k.public_part, {}, flip(sig, 77)));
}

TEST(Sign, MalformedInputsAreFalseNotErrors) {
  auto k = SigningKeyPair::from_seed(filled(4));
  Bytes sig = sign(k, as_bytes("m"));
  EXPECT_FALSE(verify({}, as_bytes("m"), sig));
  EXPECT_FALSE(verify(k.public_part, as_bytes("m"), Bytes(63)));
  EXPECT_FALSE(verify(Bytes(31, 1), as_bytes("m"), sig));
  EXPECT_FALSE(verify(k.public_part, as_bytes("m"), {}));
}

TEST(Sign, SeedDeterminism) {
  EXPECT_EQ(SigningKeyPair::from_seed(filled(9)).public_part,
            SigningKeyPair::from_seed(filled(9)).public_part);
}

TEST(SignProperty, RoundTripAndSingleBitMutations) {
  std::mt19937_64 rng(0x5ea1);
  for (int i = 0; i < 1000; ++i) {
    auto k = SigningKeyPair::from_seed(random_key(rng));
    Bytes m = random_bytes(rng, 1 + rng() % 96);
    Bytes sig = sign(k, m);
    ASSERT_TRUE(verify(k.public_part, m, sig));
    ASSERT_FALSE(verify(k.public_part, flip(m, rng() % (m.size() * 8)), sig)) << i;
    ASSERT_FALSE(verify(k.public_part, m, flip(sig, rng() % (sig.size() * 8)))) << i;
    ASSERT_FALSE(verify(flip(k.public_part, rng() % 256), m, sig)) << i;
  }
}

// --- key exchange -----------------------------------------------------------

TEST(Dh, SymmetryAndDistinctPeers) {
  auto a = ExchangeKeyPair::from_seed(filled(1));
  auto b = ExchangeKeyPair::from_seed(filled(2));
  auto c = ExchangeKeyPair::from_seed(filled(3));
  EXPECT_EQ(dh_shared(a, b.public_part), dh_shared(b, a.public_part));
  // All three pairwise secrets are distinct.
  std::set<Key32> all{dh_shared(a, b.public_part), dh_shared(a, c.public_part),
                      dh_shared(b, c.public_part)};
  EXPECT_EQ(all.size(), 3u);
  EXPECT_NE(dh_shared(a, c.public_part), dh_shared(a, b.public_part));
}

TEST(Dh, MalformedShare) {
  auto a = ExchangeKeyPair::from_seed(filled(1));
  EXPECT_THROW(dh_shared(a, {}), Error);
  EXPECT_THROW(dh_shared(a, Bytes(31, 5)), Error);
  // Small-order point: all-zero output is refused.
  EXPECT_THROW(dh_shared(a, Bytes(32, 0)), Error);
}

TEST(DhProperty, Symmetry) {
  std::mt19937_64 rng(0xd4);
  for (int i = 0; i < 1000; ++i) {
    auto a = ExchangeKeyPair::from_seed(random_key(rng));
    auto b = ExchangeKeyPair::from_seed(random_key(rng));
    ASSERT_EQ(dh_shared(a, b.public_part), dh_shared(b, a.public_part));
  }
}

// --- kdf --------------------------------------------------------------------

TEST(Kdf, DeterminismAndLabels) {
  const Key32 ms = filled(0x01);
  EXPECT_EQ(kdf("SEV-KEK", {ms}), kdf("SEV-KEK", {ms}));
  EXPECT_NE(kdf("SEV-KEK", {ms}), kdf("SEV-KIK", {ms}));
  EXPECT_THROW(kdf("", {ms}), Error);
}

TEST(Kdf, FramingIsUnambiguous) {
  // Moving a byte across an input boundary changes the output.
  EXPECT_NE(kdf("L", {as_bytes("ab"), as_bytes("c")}), kdf("L", {as_bytes("a"), as_bytes("bc")}));
  EXPECT_NE(kdf("L", {as_bytes("abc")}), kdf("L", {as_bytes("abc"), as_bytes("")}));
  EXPECT_NE(kdf("LA", {as_bytes("B")}), kdf("L", {as_bytes("AB")}));
}

TEST(KdfProperty, NoCollisionsOverCorpus) {
  std::mt19937_64 rng(0xc0);
  std::set<std::pair<std::string, std::vector<Bytes>>> inputs;
  std::set<Key32> outputs;
  while (inputs.size() < 10000) {
    std::string label = "L" + std::to_string(rng() % 50);
    std::vector<Bytes> in(rng() % 4);
    for (auto& b : in) b = random_bytes(rng, rng() % 6);
    if (!inputs.insert({label, in}).second) continue;
    std::vector<ByteView> views(in.begin(), in.end());
    Key32 out = kdf(label, views);
    ASSERT_EQ(out, kdf(label, views));
    outputs.insert(out);
  }
  EXPECT_EQ(outputs.size(), inputs.size());
}

// --- wrapping ---------------------------------------------------------------

TEST(Wrap, RoundTripAndTamper) {
  auto tek = sym(KeyPurpose::kTek, 1), tik = sym(KeyPurpose::kTik, 2);
  auto kek = sym(KeyPurpose::kKek, 3), kik = sym(KeyPurpose::kKik, 4);
  NonceCounter n(1);
  WrappedKeys w = wrap_keys(tek, tik, kek, kik, n.next());
  auto [t1, t2] = unwrap_keys(w, kek, kik);
  EXPECT_EQ(t1, tek);
  EXPECT_EQ(t2, tik);

  WrappedKeys bad = w;
  bad.mac = flip(bad.mac, 3);
  try {
    unwrap_keys(bad, kek, kik);
    FAIL() << "tampered mac accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrityFailure);
  }
  EXPECT_THROW(unwrap_keys(w, sym(KeyPurpose::kKek, 9), kik), Error);
  EXPECT_THROW(unwrap_keys(w, kek, sym(KeyPurpose::kKik, 9)), Error);
}

TEST(Wrap, PurposesMustMatchRoles) {
  auto k = sym(KeyPurpose::kTek, 1);
  EXPECT_THROW(wrap_keys(k, k, k, k, Nonce{}), Error);
}

TEST(WrapProperty, RoundTripAndEveryFieldTamperFails) {
  std::mt19937_64 rng(0x3a);
  for (int i = 0; i < 1000; ++i) {
    SymmetricKey tek{KeyPurpose::kTek, random_key(rng)}, tik{KeyPurpose::kTik, random_key(rng)};
    SymmetricKey kek{KeyPurpose::kKek, random_key(rng)}, kik{KeyPurpose::kKik, random_key(rng)};
    Nonce nonce;
    for (auto& x : nonce) x = static_cast<std::uint8_t>(rng());
    WrappedKeys w = wrap_keys(tek, tik, kek, kik, nonce);
    auto [a, b] = unwrap_keys(w, kek, kik);
    ASSERT_TRUE(a == tek && b == tik);
    WrappedKeys t = w;
    switch (i % 3) {
      case 0: t.ciphertext = flip(t.ciphertext, rng() % (t.ciphertext.size() * 8)); break;
      case 1: t.mac = flip(t.mac, rng() % (t.mac.size() * 8)); break;
      default: t.nonce[rng() % kNonceSize] ^= 0x01; break;
    }
    ASSERT_THROW(unwrap_keys(t, kek, kik), Error) << i;
  }
}

// --- AEAD -------------------------------------------------------------------

TEST(Aead, PageRoundTripAndTamperedAad) {
  auto k = sym(KeyPurpose::kTek, 5);
  NonceCounter n(4);
  Bytes page(kPageSize, 0xab);
  Nonce nonce = n.next();
  Bytes ct = aead_seal(k, nonce, page, as_bytes("aad"));
  EXPECT_EQ(aead_open(k, nonce, ct, as_bytes("aad")), page);
  EXPECT_THROW(aead_open(k, nonce, ct, as_bytes("aae")), Error);
  EXPECT_THROW(aead_open(k, n.next(), ct, as_bytes("aad")), Error);
}

TEST(Aead, DistinctNoncesDistinctCiphertexts) {
  auto k = sym(KeyPurpose::kTek, 5);
  NonceCounter n(4);
  Bytes p = to_bytes(as_bytes("same plaintext"));
  EXPECT_NE(aead_seal(k, n.next(), p, {}), aead_seal(k, n.next(), p, {}));
}

TEST(AeadProperty, RoundTripAndFailClosed) {
  std::mt19937_64 rng(0xae);
  for (int i = 0; i < 1000; ++i) {
    SymmetricKey k{KeyPurpose::kTek, random_key(rng)};
    Nonce nonce;
    for (auto& x : nonce) x = static_cast<std::uint8_t>(rng());
    Bytes p = random_bytes(rng, rng() % 200);
    Bytes aad = random_bytes(rng, 1 + rng() % 16);
    Bytes ct = aead_seal(k, nonce, p, aad);
    ASSERT_EQ(aead_open(k, nonce, ct, aad), p);
    ASSERT_THROW(aead_open(k, nonce, flip(ct, rng() % (ct.size() * 8)), aad), Error);
    ASSERT_THROW(aead_open(k, nonce, ct, flip(aad, rng() % (aad.size() * 8))), Error);
  }
}

// --- misc -------------------------------------------------------------------

TEST(Hash, DeterministicAndSuffixSensitive) {
  Bytes x = to_bytes(as_bytes("page"));
  EXPECT_EQ(hash(x), hash(x));
  Bytes x0 = x;
  x0.push_back(0);
  EXPECT_NE(hash(x), hash(x0));
}

TEST(SymmetricKeyType, LengthIsExactly32) {
  EXPECT_THROW(SymmetricKey(KeyPurpose::kTek, ByteView(Bytes(31))), Error);
  EXPECT_THROW(SymmetricKey(KeyPurpose::kTek, ByteView(Bytes(33))), Error);
  EXPECT_EQ(SymmetricKey(KeyPurpose::kTek, ByteView(Bytes(32))).bytes().size(), 32u);
}

TEST(NonceCounterType, DomainsNeverCollide) {
  NonceCounter a(1), b(2);
  std::set<Nonce> seen;
  for (int i = 0; i < 100; ++i) {
    ASSERT_TRUE(seen.insert(a.next()).second);
    ASSERT_TRUE(seen.insert(b.next()).second);
  }
}

TEST(Entropy, StreamsAreIndependentAndReproducible) {
  EntropySource a(1, "x"), b(1, "x"), c(1, "y"), d(2, "x");
  Key32 ka = a.next_key();
  EXPECT_EQ(ka, b.next_key());
  EXPECT_NE(ka, c.next_key());
  EXPECT_NE(ka, d.next_key());
  EXPECT_NE(ka, a.next_key());
}

}  // namespace
