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

// Guest owner: attest the platform, open the channel, check the launch
// measurement, and only then release the secret.

#ifndef SEVSIM_OWNER_HPP_
#define SEVSIM_OWNER_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sevsim/certs.hpp"
#include "sevsim/endpoint.hpp"
#include "sevsim/keyserver.hpp"
#include "sevsim/policy.hpp"
#include "sevsim/transport.hpp"

namespace sevsim::owner {

struct DeploymentPlan {
  std::vector<Page> image;
  GuestPolicy policy;
  Bytes secret;
  std::uint32_t expected_api_version = 0;
  Design design = Design::kBaseline;
  std::optional<certs::Certificate> trusted_oca;
};

enum class DeployReason { kOk, kChainInvalid, kVersionDenied, kMeasurementMismatch, kChannelFailure };

std::string_view to_string(DeployReason reason);

struct DeploymentReport {
  bool accepted = false;
  DeployReason reason = DeployReason::kChannelFailure;
  std::string detail;
  std::optional<msg::GuestId> guest;
  std::optional<std::pair<crypto::SymmetricKey, crypto::SymmetricKey>> transport_keys;
  bool secret_sent = false;
};

crypto::Digest expected_measurement(std::span<const Page> image, const GuestPolicy& policy,
                                    std::uint32_t api_version);

class GuestOwner {
 public:
  GuestOwner(transport::PartyId self, transport::PartyId kds_party, certs::Certificate trusted_ark,
             keyserver::KeyServerClient& kds, std::uint64_t seed);

  DeploymentReport deploy(const DeploymentPlan& plan, transport::Bus& bus,
                          const transport::PartyId& host, HostEndpoint& endpoint);

 private:
  DeploymentReport fail(transport::Bus& bus, DeployReason reason, std::string detail);
  std::optional<certs::Certificate> fetch_cek(transport::Bus& bus, const msg::PlatformInfo& info,
                                              const DeploymentPlan& plan, DeploymentReport& report);

  transport::PartyId self_;
  transport::PartyId kds_party_;
  certs::Certificate trusted_ark_;
  keyserver::KeyServerClient& kds_;
  crypto::EntropySource entropy_;
  crypto::NonceCounter nonces_{1};
};

}  // namespace sevsim::owner

#endif  // SEVSIM_OWNER_HPP_
