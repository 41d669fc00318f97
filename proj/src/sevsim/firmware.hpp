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

#ifndef SEVSIM_FIRMWARE_HPP_
#define SEVSIM_FIRMWARE_HPP_

#include <cstdint>
#include <string_view>

#include "sevsim/core.hpp"
#include "sevsim/crypto.hpp"

namespace sevsim::firmware {

enum class FirmwareKind : std::uint8_t { kPspOs = 1, kSevFw = 2 };

// Stand-in for the binary payload: what the component does once executed.
enum class Behavior : std::uint8_t {
  kHonest = 0,
  kVulnerableSignatureCheck = 1,  // PSP OS that loads unsigned components
  kPatchedIgnoresPolicy = 2,      // SEV firmware whose debug API skips the policy
  kExposesMemoryReadWrite = 3,    // SEV firmware granting raw PSP memory access
};

std::string_view to_string(FirmwareKind kind);
std::string_view to_string(Behavior behavior);
FirmwareKind kind_from_string(std::string_view text);
Behavior behavior_from_string(std::string_view text);

// Signed header + body digest. The ARK signature covers
// kind || version || behavior || body_digest.
struct FirmwareImage {
  FirmwareKind kind = FirmwareKind::kPspOs;
  std::uint32_t version = 0;
  Behavior behavior = Behavior::kHonest;
  crypto::Digest body_digest;
  Bytes signature;

  Bytes signed_bytes() const;
  bool operator==(const FirmwareImage&) const = default;
};

FirmwareImage make_image(FirmwareKind kind, std::uint32_t version, Behavior behavior,
                         ByteView body);
FirmwareImage sign_image(FirmwareImage image, const crypto::SigningKeyPair& ark);

bool verify_image(const FirmwareImage& image, ByteView ark_public, FirmwareKind expected_kind);

// SPI flash as seen by the platform owner: every slot is writable.
struct FlashContents {
  Bytes ark_public;
  FirmwareImage psp_os;
  FirmwareImage psp_os_recovery;
  FirmwareImage sev_fw;
};

// No signature or version check happens here; boot is the only gate.
void install_firmware(FlashContents& flash, const FirmwareImage& image);

}  // namespace sevsim::firmware

#endif  // SEVSIM_FIRMWARE_HPP_
