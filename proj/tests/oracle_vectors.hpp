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

// Generated by tests/oracle/gen_vectors.py. Do not edit.
#ifndef SEVSIM_TESTS_ORACLE_VECTORS_HPP_
#define SEVSIM_TESTS_ORACLE_VECTORS_HPP_

namespace oracle {

inline constexpr const char* kSha256Empty = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
inline constexpr const char* kSha256Abc = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
// s_otp = 0x42 x 32, master = 0x01 x 32
inline constexpr const char* kKdfKek = "310bb2c1c8cf9ca689ffa3c5cd0f8011e4bb3bc86eaf88a31d201ce1a87dc920";
inline constexpr const char* kKdfKik = "e75ad44ce18cdebb6269d7254127941c2a45afede4ae345f15fb4ecbedc900b2";
inline constexpr const char* kKdfEmptyInputs = "32aee8c3ab766a7748e940437b59993129641545e259dc49bbf98ef70d124e53";
inline constexpr const char* kSPspPv1 = "bb91a2d90bf6a37c699cd4f5e53573121d197a527dac902baf4d7f08fa17b065";
inline constexpr const char* kSPspPv2 = "92d2676f8d1942cf0940129a4ed52772c6383811b293f50f84a2e16f7fd3ea1f";
inline constexpr const char* kSCekPv2Sv3 = "4c6ff850089603a851bf6c729efe82f3aa5603a6af929145ac563b9348aa4ede";
inline constexpr const char* kPlatformId = "5f681ec6e3be33bd915493f32c1189df4b2806700dbd80054c881651a469d929";
inline constexpr const char* kCekBaseline = "462952be1e1656bbaa286494d60dbe9eab2766dad5dc382b279a39b342964bf9";
// enhanced CEK public keys, [pv - 1][sv - 1] for pv, sv in 1..4
inline constexpr const char* kCekEnhanced[4][4] = {
    {"2ccdc113675691a86c3d846b32fb4c8d8e42f98da364cde869ea8a120684a2c9", "6b86f6653c0a41524c10c2ab888813619229922ae0ac36cb4c469bded384b906", "ab50532a885d9c932ab9a4d78d50c09c678c1b639126da289301705dfa308d8a", "67de18e98cd5865d12d16af71b2e6453e1257bb00212f389f39b1a7e3ef4bf13"},
    {"c6d276027ed0fd1be4557535988ae69598240ca6a684de72458c78feae206cd7", "503a8df4868a2e1531a7501a57cd66ed0c81f93c16f301fbcd7922c666cf820d", "3498f51bda06091a34983505009062f3cccd261576d486fd244c2ebff5f7575b", "7a65edfcaaeff546da71a5c691c2d5fd912d58f6886d269585312b3c8559ccbb"},
    {"63c9716443fab5349dc3d01f61353c2288f0720167e3b6a979bb85abe4beb35f", "6964a0da1ee6712dc48b5d923ec5376452ab96a3440c24c8fa7d3cbdde4afc11", "20ec13736368535a40c11704dc69eb40c8a5da7471a6228fc55bb384a1b24777", "6f73b270e3a76bae890015fffdd33582806b61be7ff6a9e2a1bdfa1f31fc4b37"},
    {"1178c3fffd2f912cc42eb603c8c732d32d7a38ad154bc1263079298c670626b9", "f5f1cc096f182103bb450529163aecf6f359d5c25a0d41b344950d9c16a841b0", "5912fb205f713626ab90e2a5be1eaec62db4d9173a5e5574881bb118ddb838fe", "ec4ce01b0eaa750794c1755fa9c4bf14f54bfefaf6ed21099a575623c61f1ded"},
};
// X25519: a = 0x11 x 32, b = 0x22 x 32
inline constexpr const char* kXPubA = "7b4e909bbe7ffe44c465a220037d608ee35897d31ef972f07f74892cb0f73f13";
inline constexpr const char* kXPubB = "0faa684ed28867b97f4a6a2dee5df8ce974e76b7018e3f22a1c4cf2678570f20";
inline constexpr const char* kXShared = "9e004098efc091d4ec2663b4e9f5cfd4d7064571690b4bea97ab146ab9f35056";
inline constexpr const char* kEdPubA = "d04ab232742bb4ab3a1368bd4615e4e6d0224ab71a016baf8520a332c9778737";

}  // namespace oracle

#endif  // SEVSIM_TESTS_ORACLE_VECTORS_HPP_
