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

#include "sevsim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "sevsim/adversary.hpp"
#include "sevsim/endpoint.hpp"
#include "sevsim/keyserver.hpp"
#include "sevsim/keyserver_http.hpp"
#include "sevsim/owner.hpp"
#include "sevsim/platform.hpp"
#include "sevsim/transport.hpp"

namespace sevsim::scenario {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using firmware::Behavior;
using firmware::FirmwareKind;

constexpr std::string_view kHeader = "# sevsim transcript v1";
constexpr std::string_view kConfigPrefix = "# config ";
constexpr std::string_view kVerdictPrefix = "# verdict ";
constexpr std::size_t kImagePages = 2;

// ---------------------------------------------------------------------------
// Config parsing. Every error names the field path.

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void only_fields(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      bad(join(path, item.key()), "unknown field");
    }
  }
}

const json& required(const json& obj, const std::string& path, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) bad(join(path, key), "missing required field");
  return *it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::uint64_t get_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) bad(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::uint32_t get_u32(const json& v, const std::string& path) {
  std::uint64_t x = get_u64(v, path);
  if (x > std::numeric_limits<std::uint32_t>::max()) bad(path, "out of range");
  return static_cast<std::uint32_t>(x);
}

template <typename F>
auto convert(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

PlatformSpec parse_platform(const json& v, const std::string& path) {
  only_fields(v, path,
              {"id", "psp_os_version", "sev_fw_version", "psp_os_behavior", "sev_fw_behavior"});
  PlatformSpec p;
  p.id = get_string(required(v, path, "id"), join(path, "id"));
  if (p.id != "host" && p.id != "donor") bad(join(path, "id"), "must be \"host\" or \"donor\"");
  p.psp_os_version = get_u32(required(v, path, "psp_os_version"), join(path, "psp_os_version"));
  p.sev_fw_version = get_u32(required(v, path, "sev_fw_version"), join(path, "sev_fw_version"));
  if (p.psp_os_version == 0) bad(join(path, "psp_os_version"), "versions start at 1");
  if (p.sev_fw_version == 0) bad(join(path, "sev_fw_version"), "versions start at 1");
  const std::string pb = join(path, "psp_os_behavior");
  const std::string sb = join(path, "sev_fw_behavior");
  p.psp_os_behavior = convert(pb, [&] {
    return firmware::behavior_from_string(get_string(required(v, path, "psp_os_behavior"), pb));
  });
  p.sev_fw_behavior = convert(sb, [&] {
    return firmware::behavior_from_string(get_string(required(v, path, "sev_fw_behavior"), sb));
  });
  if (p.psp_os_behavior != Behavior::kHonest &&
      p.psp_os_behavior != Behavior::kVulnerableSignatureCheck) {
    bad(pb, "a PSP OS is honest or vulnerable_signature_check");
  }
  if (p.sev_fw_behavior == Behavior::kVulnerableSignatureCheck) {
    bad(sb, "vulnerable_signature_check applies to the PSP OS only");
  }
  return p;
}

GuestPolicy parse_policy(const json& v, const std::string& path) {
  only_fields(v, path,
              {"debug_allowed", "migration_allowed", "min_api_version", "min_psp_os_version",
               "min_sev_fw_version"});
  GuestPolicy p;
  p.debug_allowed = get_bool(required(v, path, "debug_allowed"), join(path, "debug_allowed"));
  p.migration_allowed =
      get_bool(required(v, path, "migration_allowed"), join(path, "migration_allowed"));
  p.min_api_version = get_u32(required(v, path, "min_api_version"), join(path, "min_api_version"));
  if (v.contains("min_psp_os_version")) {
    p.min_psp_os_version = get_u32(v["min_psp_os_version"], join(path, "min_psp_os_version"));
  }
  if (v.contains("min_sev_fw_version")) {
    p.min_sev_fw_version = get_u32(v["min_sev_fw_version"], join(path, "min_sev_fw_version"));
  }
  return p;
}

Expectation parse_expect(const json& v, const std::string& path) {
  only_fields(v, path, {"owner_accepted", "attacker_learned_secret", "stages"});
  Expectation e;
  e.owner_accepted = get_bool(required(v, path, "owner_accepted"), join(path, "owner_accepted"));
  e.attacker_learned_secret =
      get_bool(required(v, path, "attacker_learned_secret"), join(path, "attacker_learned_secret"));
  const json& stages = required(v, path, "stages");
  const std::string sp = join(path, "stages");
  if (!stages.is_array() || stages.empty()) bad(sp, "expected a non-empty array of strings");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    e.stages.push_back(get_string(stages[i], sp + "[" + std::to_string(i) + "]"));
  }
  return e;
}

void validate(const ScenarioConfig& c) {
  auto has = [&](std::string_view id) {
    return std::any_of(c.platforms.begin(), c.platforms.end(),
                       [&](const PlatformSpec& p) { return p.id == id; });
  };
  if (!has("host")) bad("platforms", "a platform with id \"host\" is required");
  const bool needs_donor = c.attack == Attack::kFakeSev || c.attack == Attack::kMigration ||
                           c.attack == Attack::kRollbackExtraction;
  if (needs_donor && !has("donor")) {
    bad("platforms", "attack " + std::string(to_string(c.attack)) +
                         " needs a platform with id \"donor\" to extract a CEK from");
  }
  if (c.design == Design::kEnhanced) {
    if (!c.policy.min_psp_os_version) bad("policy.min_psp_os_version", "required when design=enhanced");
    if (!c.policy.min_sev_fw_version) bad("policy.min_sev_fw_version", "required when design=enhanced");
  } else {
    if (c.policy.min_psp_os_version) bad("policy.min_psp_os_version", "only valid when design=enhanced");
    if (c.policy.min_sev_fw_version) bad("policy.min_sev_fw_version", "only valid when design=enhanced");
  }
}

// ---------------------------------------------------------------------------
// Execution.

class Runner {
 public:
  Runner(const ScenarioConfig& cfg, const std::optional<std::string>& http_addr)
      : cfg_(cfg),
        amd_(cfg.seed),
        forger_(crypto::SigningKeyPair::from_seed(
            crypto::EntropySource(cfg.seed, "firmware-forger").next_key())) {
    if (http_addr) {
      auto [host, port] = keyserver::parse_address(*http_addr);
      facade_ = std::make_unique<keyserver::HttpFacade>(amd_);
      int bound = facade_->start(host, port);
      auto client = std::make_unique<keyserver::HttpKeyServerClient>(host, bound);
      http_client_ = client.get();
      kds_ = std::move(client);
    } else {
      kds_ = std::make_unique<keyserver::LocalKeyServerClient>(amd_);
    }
    for (const char* party : {"owner", kKdsParty, adversary::kParty}) bus_.register_party(party);
    owner_ = std::make_unique<owner::GuestOwner>("owner", kKdsParty, amd_.get_root_certs().first,
                                                 *kds_, cfg.seed);
  }

  Verdict execute();

 private:
  firmware::FirmwareImage image(FirmwareKind kind, std::uint32_t version, Behavior behavior) const;
  void build_platform(const PlatformSpec& spec);
  psp::Platform& platform(const std::string& id) { return *platforms_.at(id); }
  void rollback_if_needed(psp::Platform& p);
  void extract();
  void apply_revocations();
  owner::DeploymentPlan make_plan() const;
  std::string run_attack(const owner::DeploymentPlan& plan);
  std::string rollback_extraction();

  ScenarioConfig cfg_;
  keyserver::KeyServer amd_;
  crypto::SigningKeyPair forger_;
  std::unique_ptr<keyserver::HttpFacade> facade_;
  std::unique_ptr<keyserver::KeyServerClient> kds_;
  keyserver::HttpKeyServerClient* http_client_ = nullptr;
  transport::Bus bus_;
  std::unique_ptr<owner::GuestOwner> owner_;
  std::map<std::string, std::unique_ptr<psp::Platform>> platforms_;
  std::map<std::string, std::unique_ptr<PlatformHost>> hosts_;
  adversary::AttackerAssets assets_;
  bool owner_accepted_ = false;
};

// AMD signs every PSP OS release (the vulnerable ones included) and honest
// SEV firmware. Patched SEV firmware only exists as a forgery.
firmware::FirmwareImage Runner::image(FirmwareKind kind, std::uint32_t version,
                                      Behavior behavior) const {
  std::string body = std::string(firmware::to_string(kind)) + " v" + std::to_string(version) +
                     " " + std::string(firmware::to_string(behavior));
  if (kind == FirmwareKind::kPspOs || behavior == Behavior::kHonest) {
    return amd_.release_firmware(kind, version, behavior, as_bytes(body));
  }
  return firmware::sign_image(firmware::make_image(kind, version, behavior, as_bytes(body)), forger_);
}

void Runner::build_platform(const PlatformSpec& spec) {
  Key32 s_otp = crypto::EntropySource(cfg_.seed, "otp:" + spec.id).next_key();
  amd_.register_platform(s_otp);
  firmware::FlashContents flash;
  flash.ark_public = amd_.ark_public();
  flash.psp_os = image(FirmwareKind::kPspOs, spec.psp_os_version, spec.psp_os_behavior);
  flash.psp_os_recovery = flash.psp_os;
  flash.sev_fw = image(FirmwareKind::kSevFw, spec.sev_fw_version, spec.sev_fw_behavior);
  auto p = std::make_unique<psp::Platform>(spec.id, s_otp, amd_.get_root_certs().first,
                                           std::move(flash), cfg_.seed);
  p->set_stage_sink([this, id = spec.id](std::string_view stage, const std::string& detail) {
    bus_.record_stage(id, stage, detail);
  });
  bus_.register_party(spec.id);
  hosts_[spec.id] = std::make_unique<PlatformHost>(*p);
  platforms_[spec.id] = std::move(p);
}

void Runner::rollback_if_needed(psp::Platform& p) {
  if (p.booted() && p.booted()->psp_os_behavior == Behavior::kVulnerableSignatureCheck) return;
  bus_.note(adversary::kParty, "rollback " + p.name() + " to archived psp_os v1");
  p.install_firmware(image(FirmwareKind::kPspOs, 1, Behavior::kVulnerableSignatureCheck));
  psp::BootResult r = p.boot(cfg_.design);
  bus_.note(adversary::kParty, "reboot " + p.name() + " -> " + std::string(psp::to_string(r)));
  if (p.booted()) p.init_platform();
}

void Runner::extract() {
  psp::Platform& donor = platform("donor");
  rollback_if_needed(donor);
  adversary::extract_from(assets_, donor, *kds_, bus_);
}

void Runner::apply_revocations() {
  for (const Revocation& r : cfg_.revocations) {
    if (http_client_ != nullptr) {
      http_client_->revoke(r.kind, r.version);
    } else {
      amd_.revoke_firmware(r.kind, r.version);
    }
    bus_.note(kKdsParty, "revoke " + std::string(firmware::to_string(r.kind)) + " v" +
                             std::to_string(r.version));
  }
}

owner::DeploymentPlan Runner::make_plan() const {
  crypto::EntropySource guest(cfg_.seed, "guest-image");
  owner::DeploymentPlan plan;
  for (std::size_t i = 0; i < kImagePages; ++i) plan.image.push_back(guest.next_bytes(kPageSize));
  plan.policy = cfg_.policy;
  plan.secret = concat({as_bytes("disk-key:"), guest.next_bytes(32)});
  plan.design = cfg_.design;
  for (const PlatformSpec& p : cfg_.platforms) {
    if (p.id == "host") plan.expected_api_version = p.sev_fw_version;
  }
  return plan;
}

std::string Runner::rollback_extraction() {
  extract();
  apply_revocations();
  const psp::ExtractedCek& cek = *assets_.extracted_cek;
  // Does the stolen key still match what the owner would trust?
  msg::KdsRequest req{cek.platform_id, std::nullopt, false};
  if (cfg_.design == Design::kEnhanced) {
    req.versions = certs::VersionInfo{*cfg_.policy.min_psp_os_version, *cfg_.policy.min_sev_fw_version};
  }
  bus_.log_direct(adversary::kParty, kKdsParty, msg::MsgType::kKdsRequest, req.encode());
  certs::Certificate cert;
  try {
    cert = kds_->cek_certificate(req.platform_id, req.versions);
  } catch (const Error& e) {
    bus_.log_direct(kKdsParty, adversary::kParty, msg::MsgType::kErrorReply, error_reply(e).payload);
    return std::string(to_string(e.code()));
  }
  bus_.log_direct(kKdsParty, adversary::kParty, msg::MsgType::kKdsResponse, cert.serialize());
  const Bytes probe = to_bytes(as_bytes("rollback-extraction probe"));
  const bool valid = crypto::verify(cert.public_key, probe, crypto::sign(cek.key, probe));
  bus_.note(adversary::kParty, std::string("extracted CEK ") + (valid ? "verifies" : "does not verify") +
                                   " against cek=" + crypto::fingerprint(cert.public_key));
  return valid ? "ExtractedCekValid" : "ExtractedCekStale";
}

std::string Runner::run_attack(const owner::DeploymentPlan& plan) {
  const bool needs_cek = cfg_.attack == Attack::kFakeSev || cfg_.attack == Attack::kMigration;
  if (needs_cek) extract();
  if (cfg_.attack != Attack::kRollbackExtraction) apply_revocations();

  PlatformHost& host = *hosts_.at("host");
  switch (cfg_.attack) {
    case Attack::kNone: {
      auto report = owner_->deploy(plan, bus_, "host", host);
      owner_accepted_ = report.accepted;
      return std::string(owner::to_string(report.reason));
    }
    case Attack::kFakeSev: {
      auto out = adversary::fake_sev(assets_, *owner_, plan, bus_, "host", plan.expected_api_version,
                                     cfg_.seed);
      owner_accepted_ = out.deployment && out.deployment->accepted;
      return out.stage;
    }
    case Attack::kMigration: {
      auto report = owner_->deploy(plan, bus_, "host", host);
      owner_accepted_ = report.accepted;
      if (!report.accepted) return "Deploy" + std::string(owner::to_string(report.reason));
      auto out = adversary::migration_attack(assets_, bus_, "host", host, *report.guest, *kds_,
                                             cfg_.seed);
      return out.stage;
    }
    case Attack::kDebugOverride: {
      std::uint32_t sv = plan.expected_api_version;
      adversary::DebugOverrideFirmware fw{
          image(FirmwareKind::kPspOs, 1, Behavior::kVulnerableSignatureCheck),
          image(FirmwareKind::kSevFw, sv, Behavior::kPatchedIgnoresPolicy)};
      auto out = adversary::debug_override(assets_, platform("host"), fw, *owner_, plan, bus_,
                                           "host", host);
      owner_accepted_ = out.deployment && out.deployment->accepted;
      return out.stage;
    }
    case Attack::kRollbackExtraction:
      return rollback_extraction();
  }
  return "?";
}

Verdict Runner::execute() {
  Verdict v;
  v.name = cfg_.name;
  v.design = cfg_.design;
  v.attack = cfg_.attack;
  v.expected = cfg_.expect ? *cfg_.expect : predicted(cfg_.attack, cfg_.design);

  for (const PlatformSpec& spec : cfg_.platforms) build_platform(spec);
  for (const PlatformSpec& spec : cfg_.platforms) {
    psp::Platform& p = platform(spec.id);
    psp::BootResult r = p.boot(cfg_.design);
    bus_.note(spec.id, "boot -> " + std::string(psp::to_string(r)));
    if (p.booted()) p.init_platform();
  }

  owner::DeploymentPlan plan = make_plan();
  if (!platform("host").initialized()) {
    v.observed.stage = "HostBootFailed";
  } else {
    try {
      v.observed.stage = run_attack(plan);
    } catch (const Error& e) {
      bus_.note(adversary::kParty, std::string("aborted: ") + e.what());
      v.observed.stage = std::string(to_string(e.code()));
    }
  }
  v.observed.owner_accepted = owner_accepted_;

  adversary::AttackOutcome judged;
  adversary::decide(judged, assets_, bus_, plan.secret);
  v.observed.attacker_learned_secret = judged.succeeded;
  v.knowledge = judged.knowledge;

  v.passed = v.observed.owner_accepted == v.expected.owner_accepted &&
             v.observed.attacker_learned_secret == v.expected.attacker_learned_secret &&
             std::find(v.expected.stages.begin(), v.expected.stages.end(), v.observed.stage) !=
                 v.expected.stages.end();

  std::string t;
  t += kHeader;
  t += "\n";
  t += kConfigPrefix;
  t += to_json(cfg_);
  t += "\n";
  t += bus_.render();
  std::istringstream lines(v.text());
  for (std::string line; std::getline(lines, line);) {
    t += kVerdictPrefix;
    t += line;
    t += "\n";
  }
  v.transcript = std::move(t);
  return v;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string_view to_string(Attack attack) {
  switch (attack) {
    case Attack::kNone: return "none";
    case Attack::kFakeSev: return "fake_sev";
    case Attack::kMigration: return "migration";
    case Attack::kDebugOverride: return "debug_override";
    case Attack::kRollbackExtraction: return "rollback_extraction";
  }
  return "?";
}

Attack attack_from_string(std::string_view text) {
  for (Attack a : {Attack::kNone, Attack::kFakeSev, Attack::kMigration, Attack::kDebugOverride,
                   Attack::kRollbackExtraction}) {
    if (to_string(a) == text) return a;
  }
  throw Error(ErrorCode::kConfig, "unknown attack '" + std::string(text) +
                                      "' (none|fake_sev|migration|debug_override|rollback_extraction)");
}

ScenarioConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad("", std::string("invalid JSON: ") + e.what());
  }
  only_fields(root, "",
              {"name", "design", "platforms", "policy", "attack", "seed", "revocations", "expect"});
  ScenarioConfig c;
  c.name = get_string(required(root, "", "name"), "name");
  if (c.name.empty() || c.name.find_first_of(" \t\r\n") != std::string::npos) {
    bad("name", "must be non-empty without whitespace");
  }
  c.design = convert("design", [&] { return design_from_string(get_string(required(root, "", "design"), "design")); });

  const json& platforms = required(root, "", "platforms");
  if (!platforms.is_array() || platforms.empty()) bad("platforms", "expected a non-empty array");
  for (std::size_t i = 0; i < platforms.size(); ++i) {
    PlatformSpec p = parse_platform(platforms[i], "platforms[" + std::to_string(i) + "]");
    for (const PlatformSpec& q : c.platforms) {
      if (q.id == p.id) bad("platforms[" + std::to_string(i) + "].id", "duplicate id");
    }
    c.platforms.push_back(std::move(p));
  }
  c.policy = parse_policy(required(root, "", "policy"), "policy");
  if (root.contains("attack")) {
    c.attack = convert("attack", [&] { return attack_from_string(get_string(root["attack"], "attack")); });
  }
  c.seed = get_u64(required(root, "", "seed"), "seed");
  if (root.contains("revocations")) {
    const json& revs = root["revocations"];
    if (!revs.is_array()) bad("revocations", "expected an array");
    for (std::size_t i = 0; i < revs.size(); ++i) {
      const std::string path = "revocations[" + std::to_string(i) + "]";
      only_fields(revs[i], path, {"kind", "version"});
      Revocation r;
      const std::string kp = join(path, "kind");
      r.kind = convert(kp, [&] {
        return firmware::kind_from_string(get_string(required(revs[i], path, "kind"), kp));
      });
      r.version = get_u32(required(revs[i], path, "version"), join(path, "version"));
      c.revocations.push_back(r);
    }
  }
  if (root.contains("expect")) c.expect = parse_expect(root["expect"], "expect");
  validate(c);
  return c;
}

std::string to_json(const ScenarioConfig& c) {
  ojson root;
  root["name"] = c.name;
  root["design"] = std::string(to_string(c.design));
  ojson platforms = ojson::array();
  for (const PlatformSpec& p : c.platforms) {
    ojson j;
    j["id"] = p.id;
    j["psp_os_version"] = p.psp_os_version;
    j["sev_fw_version"] = p.sev_fw_version;
    j["psp_os_behavior"] = std::string(firmware::to_string(p.psp_os_behavior));
    j["sev_fw_behavior"] = std::string(firmware::to_string(p.sev_fw_behavior));
    platforms.push_back(std::move(j));
  }
  root["platforms"] = std::move(platforms);
  ojson policy;
  policy["debug_allowed"] = c.policy.debug_allowed;
  policy["migration_allowed"] = c.policy.migration_allowed;
  policy["min_api_version"] = c.policy.min_api_version;
  if (c.policy.min_psp_os_version) policy["min_psp_os_version"] = *c.policy.min_psp_os_version;
  if (c.policy.min_sev_fw_version) policy["min_sev_fw_version"] = *c.policy.min_sev_fw_version;
  root["policy"] = std::move(policy);
  root["attack"] = std::string(to_string(c.attack));
  root["seed"] = c.seed;
  ojson revs = ojson::array();
  for (const Revocation& r : c.revocations) {
    ojson j;
    j["kind"] = std::string(firmware::to_string(r.kind));
    j["version"] = r.version;
    revs.push_back(std::move(j));
  }
  root["revocations"] = std::move(revs);
  if (c.expect) {
    ojson e;
    e["owner_accepted"] = c.expect->owner_accepted;
    e["attacker_learned_secret"] = c.expect->attacker_learned_secret;
    e["stages"] = c.expect->stages;
    root["expect"] = std::move(e);
  }
  return root.dump();
}

Expectation predicted(Attack attack, Design design) {
  const bool base = design == Design::kBaseline;
  switch (attack) {
    case Attack::kNone:
      return {true, false, {"Ok"}};
    case Attack::kFakeSev:
      return base ? Expectation{true, true, {"Ok"}} : Expectation{false, false, {"ChainInvalid"}};
    case Attack::kMigration:
      return base ? Expectation{true, true, {"Exported"}}
                  : Expectation{true, false, {"TargetVersionDenied"}};
    case Attack::kDebugOverride:
      return base ? Expectation{true, true, {"DebugRead"}}
                  : Expectation{false, false, {"ChainInvalid", "VersionDenied"}};
    case Attack::kRollbackExtraction:
      return base ? Expectation{false, false, {"ExtractedCekValid"}}
                  : Expectation{false, false, {"ExtractedCekStale"}};
  }
  return {};
}

std::string Verdict::text() const {
  std::string stages;
  for (const std::string& s : expected.stages) stages += (stages.empty() ? "" : "|") + s;
  std::ostringstream os;
  os << "scenario=" << name << " design=" << to_string(design) << " attack=" << to_string(attack)
     << "\n";
  os << "expected owner_accepted=" << yes_no(expected.owner_accepted)
     << " attacker_learned_secret=" << yes_no(expected.attacker_learned_secret)
     << " stage=" << stages << "\n";
  os << "observed owner_accepted=" << yes_no(observed.owner_accepted)
     << " attacker_learned_secret=" << yes_no(observed.attacker_learned_secret)
     << " stage=" << observed.stage << "\n";
  os << "knowledge " << knowledge << "\n";
  for (const std::string& n : notes) os << "note " << n << "\n";
  os << "result=" << (passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

ScenarioConfig apply_options(ScenarioConfig c, const RunOptions& options) {
  if (options.seed) c.seed = *options.seed;
  if (options.design && *options.design != c.design) {
    c.design = *options.design;
    if (c.design == Design::kBaseline) {
      c.policy.min_psp_os_version.reset();
      c.policy.min_sev_fw_version.reset();
    } else {
      // Require the configured host versions: the owner asks the key server
      // for exactly these.
      for (const PlatformSpec& p : c.platforms) {
        if (p.id == "host") {
          c.policy.min_psp_os_version = p.psp_os_version;
          c.policy.min_sev_fw_version = p.sev_fw_version;
        }
      }
    }
  }
  validate(c);
  return c;
}

Verdict run(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioConfig effective = apply_options(config, options);
  Runner runner(effective, options.keyserver_http);
  return runner.execute();
}

Verdict replay(std::string_view transcript_text) {
  std::istringstream in{std::string(transcript_text)};
  std::string header;
  std::string config_line;
  std::getline(in, header);
  std::getline(in, config_line);
  if (header != kHeader) bad("transcript", "missing '# sevsim transcript v1' header");
  if (config_line.rfind(kConfigPrefix, 0) != 0) bad("transcript", "missing '# config' line");
  ScenarioConfig cfg = parse_config(std::string_view(config_line).substr(kConfigPrefix.size()));

  std::string recorded_verdict;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(kVerdictPrefix, 0) == 0) {
      recorded_verdict += line.substr(kVerdictPrefix.size());
      recorded_verdict += "\n";
    }
  }

  Verdict v = run(cfg);
  const bool same_verdict = v.text() == recorded_verdict;
  const bool same_transcript = v.transcript == transcript_text;
  if (!same_verdict) v.notes.push_back("replay verdict differs from the recorded one");
  if (!same_transcript) v.notes.push_back("replay transcript differs from the recorded one");
  if (same_verdict && same_transcript) v.notes.push_back("replay reproduced verdict and transcript");
  v.passed = v.passed && same_verdict && same_transcript;
  return v;
}

namespace {

ScenarioConfig make_builtin(const std::string& name, Attack attack, Design design) {
  ScenarioConfig c;
  c.name = name;
  c.design = design;
  c.attack = attack;
  c.seed = 20190;
  c.platforms.push_back({"host", 2, 3, Behavior::kHonest, Behavior::kHonest});
  if (attack == Attack::kFakeSev || attack == Attack::kMigration ||
      attack == Attack::kRollbackExtraction) {
    c.platforms.push_back({"donor", 2, 3, Behavior::kHonest, Behavior::kHonest});
  }
  c.policy.debug_allowed = false;
  c.policy.migration_allowed = attack == Attack::kMigration;
  c.policy.min_api_version = 3;
  if (design == Design::kEnhanced) {
    c.policy.min_psp_os_version = 2;
    c.policy.min_sev_fw_version = 3;
    c.revocations.push_back({FirmwareKind::kPspOs, 1});
  }
  return c;
}

const std::vector<ScenarioConfig>& builtins() {
  static const std::vector<ScenarioConfig> all = [] {
    std::vector<ScenarioConfig> v;
    const std::pair<const char*, Attack> kinds[] = {
        {"honest-deploy", Attack::kNone},
        {"fake-sev", Attack::kFakeSev},
        {"migration", Attack::kMigration},
        {"debug-override", Attack::kDebugOverride},
        {"rollback-extraction", Attack::kRollbackExtraction},
    };
    for (const auto& [stem, attack] : kinds) {
      for (Design d : {Design::kBaseline, Design::kEnhanced}) {
        v.push_back(make_builtin(std::string(stem) + "-" + std::string(to_string(d)), attack, d));
      }
    }
    return v;
  }();
  return all;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& c : builtins()) names.push_back(c.name);
  return names;
}

std::optional<ScenarioConfig> builtin(std::string_view name) {
  for (const auto& c : builtins()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

}  // namespace sevsim::scenario
