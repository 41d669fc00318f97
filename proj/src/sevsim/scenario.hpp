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

// Scenario configuration, the built-in attack matrix, and the runner.

#ifndef SEVSIM_SCENARIO_HPP_
#define SEVSIM_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sevsim/core.hpp"
#include "sevsim/firmware.hpp"
#include "sevsim/policy.hpp"

namespace sevsim::scenario {

enum class Attack { kNone, kFakeSev, kMigration, kDebugOverride, kRollbackExtraction };

std::string_view to_string(Attack attack);
Attack attack_from_string(std::string_view text);

struct PlatformSpec {
  std::string id;  // "host" or "donor"
  std::uint32_t psp_os_version = 0;
  std::uint32_t sev_fw_version = 0;
  firmware::Behavior psp_os_behavior = firmware::Behavior::kHonest;
  firmware::Behavior sev_fw_behavior = firmware::Behavior::kHonest;

  bool operator==(const PlatformSpec&) const = default;
};

struct Revocation {
  firmware::FirmwareKind kind = firmware::FirmwareKind::kPspOs;
  std::uint32_t version = 0;

  bool operator==(const Revocation&) const = default;
};

struct Expectation {
  bool owner_accepted = false;
  bool attacker_learned_secret = false;
  std::vector<std::string> stages;  // any of these counts as a match

  bool operator==(const Expectation&) const = default;
};

struct ScenarioConfig {
  std::string name;
  Design design = Design::kBaseline;
  std::vector<PlatformSpec> platforms;
  GuestPolicy policy;
  Attack attack = Attack::kNone;
  std::uint64_t seed = 0;
  std::vector<Revocation> revocations;
  std::optional<Expectation> expect;

  bool operator==(const ScenarioConfig&) const = default;
};

// Throws Error(kConfig) naming the offending field.
ScenarioConfig parse_config(std::string_view json_text);
// Canonical one-line JSON; parse_config(to_json(c)) == c.
std::string to_json(const ScenarioConfig& config);

// The outcome the attack x design matrix predicts.
Expectation predicted(Attack attack, Design design);

struct Outcome {
  bool owner_accepted = false;
  bool attacker_learned_secret = false;
  std::string stage;
};

struct Verdict {
  std::string name;
  Design design = Design::kBaseline;
  Attack attack = Attack::kNone;
  Expectation expected;
  Outcome observed;
  std::string knowledge;
  bool passed = false;
  std::string transcript;
  std::vector<std::string> notes;  // replay diagnostics

  std::string text() const;
  int exit_code() const { return passed ? 0 : 1; }
};

struct RunOptions {
  std::optional<Design> design;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> keyserver_http;  // host:port of an in-process facade
};

// Applies overrides and normalizes the policy to the effective design.
ScenarioConfig apply_options(ScenarioConfig config, const RunOptions& options);

Verdict run(const ScenarioConfig& config, const RunOptions& options = {});

// Re-runs the config recorded in a transcript; passes only if both the
// verdict and every transcript byte are reproduced.
Verdict replay(std::string_view transcript_text);

std::vector<std::string> builtin_names();
std::optional<ScenarioConfig> builtin(std::string_view name);

}  // namespace sevsim::scenario

#endif  // SEVSIM_SCENARIO_HPP_
