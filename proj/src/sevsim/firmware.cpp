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

#include "sevsim/firmware.hpp"

#include <string>

namespace sevsim::firmware {

std::string_view to_string(FirmwareKind kind) {
  return kind == FirmwareKind::kPspOs ? "psp_os" : "sev_fw";
}

std::string_view to_string(Behavior behavior) {
  switch (behavior) {
    case Behavior::kHonest: return "honest";
    case Behavior::kVulnerableSignatureCheck: return "vulnerable_signature_check";
    case Behavior::kPatchedIgnoresPolicy: return "patched_ignores_policy";
    case Behavior::kExposesMemoryReadWrite: return "exposes_memory_read_write";
  }
  return "?";
}

FirmwareKind kind_from_string(std::string_view text) {
  if (text == "psp_os" || text == "pspos") return FirmwareKind::kPspOs;
  if (text == "sev_fw" || text == "sevfw") return FirmwareKind::kSevFw;
  throw Error(ErrorCode::kConfig, "unknown firmware kind '" + std::string(text) + "'");
}

Behavior behavior_from_string(std::string_view text) {
  for (Behavior b : {Behavior::kHonest, Behavior::kVulnerableSignatureCheck,
                     Behavior::kPatchedIgnoresPolicy, Behavior::kExposesMemoryReadWrite}) {
    if (to_string(b) == text) return b;
  }
  throw Error(ErrorCode::kConfig, "unknown firmware behavior '" + std::string(text) + "'");
}

Bytes FirmwareImage::signed_bytes() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind))
      .u32(version)
      .u8(static_cast<std::uint8_t>(behavior))
      .raw(body_digest.bytes);
  return std::move(w).take();
}

FirmwareImage make_image(FirmwareKind kind, std::uint32_t version, Behavior behavior,
                         ByteView body) {
  FirmwareImage img;
  img.kind = kind;
  img.version = version;
  img.behavior = behavior;
  img.body_digest = crypto::hash(body);
  return img;
}

FirmwareImage sign_image(FirmwareImage image, const crypto::SigningKeyPair& ark) {
  image.signature = crypto::sign(ark, image.signed_bytes());
  return image;
}

bool verify_image(const FirmwareImage& image, ByteView ark_public, FirmwareKind expected_kind) {
  return image.kind == expected_kind &&
         crypto::verify(ark_public, image.signed_bytes(), image.signature);
}

void install_firmware(FlashContents& flash, const FirmwareImage& image) {
  if (image.kind == FirmwareKind::kPspOs) {
    flash.psp_os = image;
  } else {
    flash.sev_fw = image;
  }
}

}  // namespace sevsim::firmware
