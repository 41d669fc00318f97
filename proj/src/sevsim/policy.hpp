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

#ifndef SEVSIM_POLICY_HPP_
#define SEVSIM_POLICY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sevsim/core.hpp"
#include "sevsim/crypto.hpp"

namespace sevsim {

inline constexpr std::size_t kPageSize = 4096;

using Page = Bytes;

// Owner-imposed restrictions on what the platform may do with a guest.
// Enhanced policies carry both minimum firmware versions, baseline neither.
struct GuestPolicy {
  bool debug_allowed = false;
  bool migration_allowed = false;
  std::uint32_t min_api_version = 0;
  std::optional<std::uint32_t> min_psp_os_version;
  std::optional<std::uint32_t> min_sev_fw_version;

  bool is_enhanced() const { return min_psp_os_version && min_sev_fw_version; }

  Bytes encode() const;
  static GuestPolicy decode(ByteView in);
  std::string describe() const;

  bool operator==(const GuestPolicy&) const = default;
};

// Launch measurement shared by the platform and the guest owner:
// hash(page_0 || ... || page_n || encode(policy) || u32(api_version)).
// Every page must be exactly kPageSize bytes.
crypto::Digest measure(std::span<const Page> pages, const GuestPolicy& policy,
                       std::uint32_t api_version);

}  // namespace sevsim

#endif  // SEVSIM_POLICY_HPP_
