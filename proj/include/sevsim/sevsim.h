/*
 * Copyright 2026 The sevsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libsevsim.
 *
 * Every function returns a sevsim_status. On failure, sevsim_last_error()
 * returns a message for the calling thread, valid until the next call on the
 * same thread. Handles are opaque and owned by the caller; release them with
 * the matching *_free / *_destroy function. Strings returned through out
 * parameters are owned by the handle they came from unless noted otherwise.
 */

#ifndef SEVSIM_SEVSIM_H_
#define SEVSIM_SEVSIM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define SEVSIM_API __attribute__((visibility("default")))
#else
#define SEVSIM_API
#endif

typedef enum sevsim_status {
  SEVSIM_OK = 0,
  SEVSIM_ERR_INVALID_ARGUMENT = 1,
  SEVSIM_ERR_CONFIG = 2,
  SEVSIM_ERR_NOT_FOUND = 3,
  SEVSIM_ERR_REVOKED = 4,
  SEVSIM_ERR_IO = 5,
  SEVSIM_ERR_INTERNAL = 6
} sevsim_status;

typedef struct sevsim_verdict sevsim_verdict;
typedef struct sevsim_keyserver sevsim_keyserver;

SEVSIM_API const char* sevsim_last_error(void);
SEVSIM_API const char* sevsim_version(void);

/* Built-in scenarios. */
SEVSIM_API size_t sevsim_builtin_count(void);
SEVSIM_API const char* sevsim_builtin_name(size_t index); /* NULL if out of range */
/* *json_out must be released with sevsim_string_free. */
SEVSIM_API sevsim_status sevsim_builtin_config(const char* name, char** json_out);
SEVSIM_API void sevsim_string_free(char* s);

typedef struct sevsim_run_options {
  const char* design;         /* "baseline", "enhanced" or NULL to keep the config's */
  int has_seed;               /* non-zero: override the config seed with `seed` */
  uint64_t seed;
  const char* keyserver_http; /* "host:port" to serve the key server over HTTP, or NULL */
} sevsim_run_options;

/* Runs a scenario given as JSON text. options may be NULL. */
SEVSIM_API sevsim_status sevsim_run(const char* config_json, const sevsim_run_options* options,
                                    sevsim_verdict** out);
/* Re-runs the scenario recorded in a transcript and compares. */
SEVSIM_API sevsim_status sevsim_replay(const char* transcript, sevsim_verdict** out);

SEVSIM_API int sevsim_verdict_passed(const sevsim_verdict* v);
SEVSIM_API int sevsim_verdict_exit_code(const sevsim_verdict* v);
SEVSIM_API const char* sevsim_verdict_text(const sevsim_verdict* v);
SEVSIM_API const char* sevsim_verdict_transcript(const sevsim_verdict* v);
SEVSIM_API const char* sevsim_verdict_stage(const sevsim_verdict* v);
SEVSIM_API void sevsim_verdict_free(sevsim_verdict* v);

/* Stand-alone key server. */
typedef enum sevsim_fw_kind { SEVSIM_FW_PSP_OS = 1, SEVSIM_FW_SEV_FW = 2 } sevsim_fw_kind;

SEVSIM_API sevsim_status sevsim_keyserver_create(uint64_t seed, sevsim_keyserver** out);
SEVSIM_API sevsim_status sevsim_keyserver_register(sevsim_keyserver* ks, const uint8_t s_otp[32],
                                                   uint8_t platform_id_out[32]);
/* enhanced == 0: baseline query (pv/sv ignored). Writes the CEK public key. */
SEVSIM_API sevsim_status sevsim_keyserver_cek_public(sevsim_keyserver* ks,
                                                     const uint8_t platform_id[32], int enhanced,
                                                     uint32_t pv, uint32_t sv,
                                                     uint8_t public_key_out[32]);
SEVSIM_API sevsim_status sevsim_keyserver_revoke(sevsim_keyserver* ks, sevsim_fw_kind kind,
                                                 uint32_t version);
/* Starts the HTTP facade; port 0 picks one. Stops on destroy. */
SEVSIM_API sevsim_status sevsim_keyserver_serve_http(sevsim_keyserver* ks, const char* host,
                                                     int port, int* bound_port);
SEVSIM_API void sevsim_keyserver_destroy(sevsim_keyserver* ks);

#ifdef __cplusplus
}
#endif

#endif /* SEVSIM_SEVSIM_H_ */
