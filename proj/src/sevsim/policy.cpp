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

#include "sevsim/policy.hpp"

#include <sstream>

namespace sevsim {
namespace {

void write_optional(ByteWriter& w, const std::optional<std::uint32_t>& v) {
  w.boolean(v.has_value()).u32(v.value_or(0));
}

std::optional<std::uint32_t> read_optional(ByteReader& r) {
  bool present = r.boolean();
  std::uint32_t v = r.u32();
  if (!present) {
    if (v != 0) throw Error(ErrorCode::kMalformedInput, "absent version must encode as zero");
    return std::nullopt;
  }
  return v;
}

}  // namespace

Bytes GuestPolicy::encode() const {
  ByteWriter w;
  w.boolean(debug_allowed).boolean(migration_allowed).u32(min_api_version);
  write_optional(w, min_psp_os_version);
  write_optional(w, min_sev_fw_version);
  return std::move(w).take();
}

GuestPolicy GuestPolicy::decode(ByteView in) {
  ByteReader r(in);
  GuestPolicy p;
  p.debug_allowed = r.boolean();
  p.migration_allowed = r.boolean();
  p.min_api_version = r.u32();
  p.min_psp_os_version = read_optional(r);
  p.min_sev_fw_version = read_optional(r);
  r.expect_end();
  return p;
}

std::string GuestPolicy::describe() const {
  std::ostringstream os;
  os << "debug=" << (debug_allowed ? "yes" : "no")
     << " migration=" << (migration_allowed ? "yes" : "no") << " min_api=" << min_api_version;
  if (min_psp_os_version) os << " min_pv=" << *min_psp_os_version;
  if (min_sev_fw_version) os << " min_sv=" << *min_sev_fw_version;
  return os.str();
}

crypto::Digest measure(std::span<const Page> pages, const GuestPolicy& policy,
                       std::uint32_t api_version) {
  Bytes input;
  input.reserve(pages.size() * kPageSize + 32);
  for (const Page& page : pages) {
    if (page.size() != kPageSize) {
      throw Error(ErrorCode::kInvalidArgument, "guest pages must be exactly 4096 bytes");
    }
    input.insert(input.end(), page.begin(), page.end());
  }
  Bytes encoded_policy = policy.encode();
  input.insert(input.end(), encoded_policy.begin(), encoded_policy.end());
  Bytes api = crypto::encode_u32(api_version);
  input.insert(input.end(), api.begin(), api.end());
  return crypto::hash(input);
}

}  // namespace sevsim
