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

#include "sevsim/sevsim.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "sevsim/keyserver.hpp"
#include "sevsim/keyserver_http.hpp"
#include "sevsim/scenario.hpp"

struct sevsim_verdict {
  sevsim::scenario::Verdict verdict;
  std::string text;
};

struct sevsim_keyserver {
  explicit sevsim_keyserver(std::uint64_t seed) : server(seed) {}

  sevsim::keyserver::KeyServer server;
  std::unique_ptr<sevsim::keyserver::HttpFacade> facade;
};

namespace {

thread_local std::string g_last_error;

sevsim_status fail(sevsim_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

sevsim_status map_code(sevsim::ErrorCode code) {
  using sevsim::ErrorCode;
  switch (code) {
    case ErrorCode::kConfig: return SEVSIM_ERR_CONFIG;
    case ErrorCode::kNotFound: return SEVSIM_ERR_NOT_FOUND;
    case ErrorCode::kRevoked: return SEVSIM_ERR_REVOKED;
    case ErrorCode::kIo: return SEVSIM_ERR_IO;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedInput: return SEVSIM_ERR_INVALID_ARGUMENT;
    default: return SEVSIM_ERR_INTERNAL;
  }
}

template <typename F>
sevsim_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SEVSIM_OK;
  } catch (const sevsim::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(SEVSIM_ERR_INTERNAL, e.what());
  }
}

sevsim::Key32 to_key(const uint8_t* p) {
  sevsim::Key32 k{};
  std::memcpy(k.data(), p, k.size());
  return k;
}

}  // namespace

extern "C" {

const char* sevsim_last_error(void) { return g_last_error.c_str(); }

const char* sevsim_version(void) { return "0.1.0"; }

size_t sevsim_builtin_count(void) { return sevsim::scenario::builtin_names().size(); }

const char* sevsim_builtin_name(size_t index) {
  static const std::vector<std::string> names = sevsim::scenario::builtin_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

sevsim_status sevsim_builtin_config(const char* name, char** json_out) {
  if (name == nullptr || json_out == nullptr) {
    return fail(SEVSIM_ERR_INVALID_ARGUMENT, "name and json_out are required");
  }
  auto cfg = sevsim::scenario::builtin(name);
  if (!cfg) return fail(SEVSIM_ERR_NOT_FOUND, std::string("no built-in scenario '") + name + "'");
  std::string json = sevsim::scenario::to_json(*cfg);
  *json_out = static_cast<char*>(std::malloc(json.size() + 1));
  if (*json_out == nullptr) return fail(SEVSIM_ERR_INTERNAL, "out of memory");
  std::memcpy(*json_out, json.c_str(), json.size() + 1);
  return SEVSIM_OK;
}

void sevsim_string_free(char* s) { std::free(s); }

sevsim_status sevsim_run(const char* config_json, const sevsim_run_options* options,
                         sevsim_verdict** out) {
  if (config_json == nullptr || out == nullptr) {
    return fail(SEVSIM_ERR_INVALID_ARGUMENT, "config_json and out are required");
  }
  *out = nullptr;
  return guarded([&] {
    sevsim::scenario::RunOptions opts;
    if (options != nullptr) {
      if (options->design != nullptr) opts.design = sevsim::design_from_string(options->design);
      if (options->has_seed != 0) opts.seed = options->seed;
      if (options->keyserver_http != nullptr) opts.keyserver_http = options->keyserver_http;
    }
    auto cfg = sevsim::scenario::parse_config(config_json);
    auto v = std::make_unique<sevsim_verdict>();
    v->verdict = sevsim::scenario::run(cfg, opts);
    v->text = v->verdict.text();
    *out = v.release();
  });
}

sevsim_status sevsim_replay(const char* transcript, sevsim_verdict** out) {
  if (transcript == nullptr || out == nullptr) {
    return fail(SEVSIM_ERR_INVALID_ARGUMENT, "transcript and out are required");
  }
  *out = nullptr;
  return guarded([&] {
    auto v = std::make_unique<sevsim_verdict>();
    v->verdict = sevsim::scenario::replay(transcript);
    v->text = v->verdict.text();
    *out = v.release();
  });
}

int sevsim_verdict_passed(const sevsim_verdict* v) { return v != nullptr && v->verdict.passed; }

int sevsim_verdict_exit_code(const sevsim_verdict* v) {
  return v == nullptr ? 2 : v->verdict.exit_code();
}

const char* sevsim_verdict_text(const sevsim_verdict* v) { return v ? v->text.c_str() : ""; }

const char* sevsim_verdict_transcript(const sevsim_verdict* v) {
  return v ? v->verdict.transcript.c_str() : "";
}

const char* sevsim_verdict_stage(const sevsim_verdict* v) {
  return v ? v->verdict.observed.stage.c_str() : "";
}

void sevsim_verdict_free(sevsim_verdict* v) { delete v; }

sevsim_status sevsim_keyserver_create(uint64_t seed, sevsim_keyserver** out) {
  if (out == nullptr) return fail(SEVSIM_ERR_INVALID_ARGUMENT, "out is required");
  *out = nullptr;
  return guarded([&] { *out = new sevsim_keyserver(seed); });
}

sevsim_status sevsim_keyserver_register(sevsim_keyserver* ks, const uint8_t s_otp[32],
                                        uint8_t platform_id_out[32]) {
  if (ks == nullptr || s_otp == nullptr || platform_id_out == nullptr) {
    return fail(SEVSIM_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto id = ks->server.register_platform(to_key(s_otp));
    std::memcpy(platform_id_out, id.data(), id.size());
  });
}

sevsim_status sevsim_keyserver_cek_public(sevsim_keyserver* ks, const uint8_t platform_id[32],
                                          int enhanced, uint32_t pv, uint32_t sv,
                                          uint8_t public_key_out[32]) {
  if (ks == nullptr || platform_id == nullptr || public_key_out == nullptr) {
    return fail(SEVSIM_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto id = to_key(platform_id);
    auto cert = enhanced ? ks->server.get_cek_certificate_enhanced(id, pv, sv)
                         : ks->server.get_cek_certificate_baseline(id);
    std::memcpy(public_key_out, cert.public_key.data(), 32);
  });
}

sevsim_status sevsim_keyserver_revoke(sevsim_keyserver* ks, sevsim_fw_kind kind,
                                      uint32_t version) {
  if (ks == nullptr) return fail(SEVSIM_ERR_INVALID_ARGUMENT, "null key server");
  if (kind != SEVSIM_FW_PSP_OS && kind != SEVSIM_FW_SEV_FW) {
    return fail(SEVSIM_ERR_INVALID_ARGUMENT, "unknown firmware kind");
  }
  return guarded([&] {
    ks->server.revoke_firmware(static_cast<sevsim::firmware::FirmwareKind>(kind), version);
  });
}

sevsim_status sevsim_keyserver_serve_http(sevsim_keyserver* ks, const char* host, int port,
                                          int* bound_port) {
  if (ks == nullptr || host == nullptr) return fail(SEVSIM_ERR_INVALID_ARGUMENT, "null argument");
  if (ks->facade) return fail(SEVSIM_ERR_INVALID_ARGUMENT, "already serving");
  return guarded([&] {
    auto facade = std::make_unique<sevsim::keyserver::HttpFacade>(ks->server);
    int p = facade->start(host, port);
    ks->facade = std::move(facade);
    if (bound_port != nullptr) *bound_port = p;
  });
}

void sevsim_keyserver_destroy(sevsim_keyserver* ks) { delete ks; }

}  // extern "C"
