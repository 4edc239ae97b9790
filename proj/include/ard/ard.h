// Copyright 2026 The ARD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ARD__ARD_H_
#define ARD__ARD_H_

#include <stdint.h>

#if defined(ARD_BUILDING_LIBRARY)
#define ARD_API __attribute__((visibility("default")))
#else
#define ARD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ard_status {
  ARD_OK = 0,
  ARD_ERR_CONFIG = 1,            /* invalid configuration or record */
  ARD_ERR_RUNTIME = 2,           /* planning, sampling, inference or I/O failure */
  ARD_ERR_INVALID_ARGUMENT = 3,  /* null handle, malformed weights */
  ARD_ERR_STATE = 4              /* operation not allowed in the session's state */
} ard_status;

typedef struct ard_session ard_session;
typedef struct ard_service ard_service;

/* Strings returned through char** out-parameters are owned by the caller; release them
 * with ard_free. All JSON is UTF-8. */

ARD_API const char * ard_version(void);
/* Message of the last failed call on this thread; empty when none. */
ARD_API const char * ard_last_error(void);
ARD_API void ard_free(char * str);

/* Full experiment config with every default filled in. Either input may be NULL. */
ARD_API ard_status ard_config_resolve(const char * config_json, const char * overrides_json, char ** out_json);

ARD_API ard_status ard_session_create(
  const char * config_json, const char * overrides_json, const char * session_id, ard_session ** out);
/* Resumes a session from a stored record. */
ARD_API ard_status ard_session_open(const char * record_json, ard_session ** out);
ARD_API void ard_session_destroy(ard_session * session);

/* Simulated designer: one iteration, or iterate until finished. */
ARD_API ard_status ard_session_step(ard_session * session);
ARD_API ard_status ard_session_run(ard_session * session);
/* External designer: weights as an object keyed by feature name. */
ARD_API ard_status ard_session_submit(ard_session * session, const char * weights_json);

ARD_API ard_status ard_session_id(const ard_session * session, char ** out_id);
ARD_API ard_status ard_session_status(const ard_session * session, char ** out_json);
ARD_API ard_status ard_session_record(const ard_session * session, char ** out_json);
/* Recomputes the evaluation of the current posterior mean. */
ARD_API ard_status ard_session_evaluate(const ard_session * session, char ** out_json);
/* One acquisition step on the current belief; the session is not modified. */
ARD_API ard_status ard_session_propose(
  const ard_session * session, const char * method, uint64_t seed, char ** out_json);
ARD_API ard_status ard_session_save(const ard_session * session, const char * path);

/* Runs methods x seeds and writes per-session records plus suite_summary.{csv,json}. */
ARD_API ard_status ard_suite_run(
  const char * config_json, const char * overrides_json, const char * out_dir, char ** out_summary_json);

ARD_API ard_status ard_service_create(const char * config_json, const char * out_dir, ard_service ** out);
/* Port 0 picks a free port; the bound port is written to bound_port when non-NULL. */
ARD_API ard_status ard_service_bind(ard_service * service, const char * host, int port, int * bound_port);
/* Blocks until ard_service_stop is called from another thread. */
ARD_API ard_status ard_service_listen(ard_service * service);
ARD_API ard_status ard_service_stop(ard_service * service);
ARD_API void ard_service_destroy(ard_service * service);

#ifdef __cplusplus
}
#endif

#endif  // ARD__ARD_H_
