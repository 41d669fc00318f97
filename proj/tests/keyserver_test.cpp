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
#include <httplib.h>

#include <atomic>
#include <thread>

#include "oracle_vectors.hpp"
#include "sevsim/keyserver.hpp"
#include "sevsim/keyserver_http.hpp"
#include "test_world.hpp"

namespace {

using namespace sevsim;
using namespace sevsim::keyserver;
using certs::KeyRole;
using firmware::FirmwareKind;
using testworld::filled;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

TEST(Register, IdempotentDistinctAndOracle) {
  KeyServer ks(1);
  auto id = ks.register_platform(filled(0x42));
  EXPECT_EQ(id, ks.register_platform(filled(0x42)));
  EXPECT_NE(id, ks.register_platform(filled(0x43)));
  EXPECT_EQ(id.size(), 32u);
  EXPECT_EQ(to_hex(id), oracle::kPlatformId);
}

TEST(RootCerts, SelfSignedArkAndArkSignedAsk) {
  KeyServer ks(1);
  auto [ark, ask] = ks.get_root_certs();
  EXPECT_TRUE(crypto::verify(ark.public_key, ask.tbs_bytes(), ask.signature_by(KeyRole::kArk)->signature));
  EXPECT_TRUE(crypto::verify(ark.public_key, ark.tbs_bytes(), ark.signature_by(KeyRole::kArk)->signature));
  auto [ark2, ask2] = ks.get_root_certs();
  EXPECT_EQ(ark.serialize(), ark2.serialize());
  EXPECT_EQ(ask.serialize(), ask2.serialize());
  EXPECT_EQ(ark.public_key, ks.ark_public());
}

TEST(BaselineCek, OracleNotFoundDeterminism) {
  KeyServer ks(1);
  auto id = ks.register_platform(filled(0x42));
  auto cert = ks.get_cek_certificate_baseline(id);
  EXPECT_EQ(to_hex(cert.public_key), oracle::kCekBaseline);
  EXPECT_FALSE(cert.version_info.has_value());
  EXPECT_EQ(cert.public_key, ks.get_cek_certificate_baseline(id).public_key);
  auto [ark, ask] = ks.get_root_certs();
  EXPECT_TRUE(crypto::verify(ask.public_key, cert.tbs_bytes(), cert.signature_by(KeyRole::kAsk)->signature));
  EXPECT_EQ(code_of([&] { ks.get_cek_certificate_baseline(filled(0)); }), ErrorCode::kNotFound);
}

TEST(EnhancedCek, OracleGrid) {
  KeyServer ks(1);
  auto id = ks.register_platform(filled(0x42));
  for (std::uint32_t pv = 1; pv <= 4; ++pv) {
    for (std::uint32_t sv = 1; sv <= 4; ++sv) {
      auto cert = ks.get_cek_certificate_enhanced(id, pv, sv);
      EXPECT_EQ(to_hex(cert.public_key), oracle::kCekEnhanced[pv - 1][sv - 1]) << pv << "," << sv;
      ASSERT_TRUE(cert.version_info.has_value());
      EXPECT_EQ(*cert.version_info, (certs::VersionInfo{pv, sv}));
    }
  }
  EXPECT_NE(ks.get_cek_certificate_enhanced(id, 1, 2).public_key,
            ks.get_cek_certificate_enhanced(id, 2, 2).public_key);
  EXPECT_EQ(code_of([&] { ks.get_cek_certificate_enhanced(filled(0), 1, 1); }), ErrorCode::kNotFound);
}

TEST(Revocation, RevokedIdempotentBaselineUnaffected) {
  KeyServer ks(1);
  auto id = ks.register_platform(filled(0x42));
  auto before = ks.get_cek_certificate_baseline(id);
  ks.revoke_firmware(FirmwareKind::kPspOs, 1);
  EXPECT_EQ(code_of([&] { ks.get_cek_certificate_enhanced(id, 1, 3); }), ErrorCode::kRevoked);
  EXPECT_NO_THROW(ks.get_cek_certificate_enhanced(id, 2, 3));
  auto state = ks.revocations();
  ks.revoke_firmware(FirmwareKind::kPspOs, 1);
  EXPECT_EQ(ks.revocations().revoked_psp_os_versions, state.revoked_psp_os_versions);
  ks.revoke_firmware(FirmwareKind::kSevFw, 3);
  EXPECT_EQ(code_of([&] { ks.get_cek_certificate_enhanced(id, 2, 3); }), ErrorCode::kRevoked);
  EXPECT_EQ(ks.get_cek_certificate_baseline(id).serialize(), before.serialize());
  EXPECT_TRUE(ks.revocations().is_revoked(FirmwareKind::kSevFw, 3));
  EXPECT_FALSE(ks.revocations().is_revoked(FirmwareKind::kSevFw, 2));
  EXPECT_FALSE(ks.revocations().is_revoked(FirmwareKind::kPspOs, 3));
}

TEST(ReleaseFirmware, SignedByArk) {
  KeyServer ks(1);
  auto img = ks.release_firmware(FirmwareKind::kSevFw, 3, firmware::Behavior::kHonest, as_bytes("x"));
  EXPECT_TRUE(firmware::verify_image(img, ks.ark_public(), FirmwareKind::kSevFw));
  EXPECT_FALSE(firmware::verify_image(img, ks.ark_public(), FirmwareKind::kPspOs));
}

TEST(Concurrency, ReadersDuringRevocation) {
  KeyServer ks(1);
  auto id = ks.register_platform(filled(0x42));
  std::atomic<int> served{0}, revoked{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        try {
          ks.get_cek_certificate_enhanced(id, 1, 1);
          ++served;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kRevoked) ++revoked;
        }
      }
    });
  }
  ks.revoke_firmware(FirmwareKind::kPspOs, 1);
  for (auto& t : readers) t.join();
  EXPECT_EQ(served + revoked, 800);
  EXPECT_EQ(code_of([&] { ks.get_cek_certificate_enhanced(id, 1, 1); }), ErrorCode::kRevoked);
}

TEST(Http, FacadeMatchesInProcessServer) {
  KeyServer ks(5);
  auto id = ks.register_platform(filled(0x42));
  HttpFacade facade(ks);
  int port = facade.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  HttpKeyServerClient client("127.0.0.1", port);

  auto [ark, ask] = client.root_certs();
  EXPECT_EQ(ark.serialize(), ks.get_root_certs().first.serialize());
  EXPECT_EQ(ask.serialize(), ks.get_root_certs().second.serialize());
  EXPECT_EQ(to_hex(client.cek_certificate(id, std::nullopt).public_key), oracle::kCekBaseline);
  EXPECT_EQ(to_hex(client.cek_certificate(id, certs::VersionInfo{2, 3}).public_key),
            oracle::kCekEnhanced[1][2]);
  EXPECT_EQ(code_of([&] { client.cek_certificate(filled(1), std::nullopt); }), ErrorCode::kNotFound);

  client.revoke(FirmwareKind::kPspOs, 2);
  EXPECT_EQ(code_of([&] { client.cek_certificate(id, certs::VersionInfo{2, 3}); }),
            ErrorCode::kRevoked);
  EXPECT_TRUE(ks.revocations().is_revoked(FirmwareKind::kPspOs, 2));

  httplib::Client raw("127.0.0.1", port);
  EXPECT_EQ(raw.Get("/cek?platform_id=zz")->status, 400);
  EXPECT_EQ(raw.Get("/cek?platform_id=" + to_hex(id) + "&pv=1")->status, 400);
  EXPECT_EQ(raw.Post("/revoke?kind=bios&version=1")->status, 400);
  facade.stop();
}

TEST(Http, ParseAddress) {
  EXPECT_EQ(parse_address("127.0.0.1:0"), (std::pair<std::string, int>{"127.0.0.1", 0}));
  EXPECT_EQ(parse_address("localhost:8080").second, 8080);
  EXPECT_EQ(code_of([] { parse_address("nohost"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_address("h:99999"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_address("h:x"); }), ErrorCode::kConfig);
}

TEST(Http, UnreachableServerIsIo) {
  HttpKeyServerClient client("127.0.0.1", 1);
  EXPECT_EQ(code_of([&] { client.root_certs(); }), ErrorCode::kIo);
}

}  // namespace
