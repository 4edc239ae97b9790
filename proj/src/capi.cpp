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

#include "ard/ard.h"

#include "ard/orchestrator.hpp"
#include "ard/serialization.hpp"
#include "ard/service.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

using namespace ard;

struct ard_session
{
  std::unique_ptr<Session> session;
};

struct ard_service
{
  std::unique_ptr<SessionService> service;
};

namespace
{

thread_local std::string g_last_error;

char * dup_string(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string_view view(const char * s)
{
  return s == nullptr ? std::string_view{} : std::string_view{s};
}

template <class F>
ard_status guarded(F && f)
{
  g_last_error.clear();
  try {
    f();
    return ARD_OK;
  } catch (const ConfigError & e) {
    g_last_error = e.what();
    return ARD_ERR_CONFIG;
  } catch (const WeightFormatError & e) {
    g_last_error = e.what();
    return ARD_ERR_INVALID_ARGUMENT;
  } catch (const DimensionError & e) {
    g_last_error = e.what();
    return ARD_ERR_INVALID_ARGUMENT;
  } catch (const StateError & e) {
    g_last_error = e.what();
    return ARD_ERR_STATE;
  } catch (const json::exception & e) {
    g_last_error = e.what();
    return ARD_ERR_CONFIG;
  } catch (const std::exception & e) {
    g_last_error = e.what();
    return ARD_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return ARD_ERR_RUNTIME;
  }
}

ard_status invalid(const char * what)
{
  g_last_error = what;
  return ARD_ERR_INVALID_ARGUMENT;
}

json status_json(const Session & s)
{
  const auto & rec = s.record();
  return {
    {"session_id", rec.session_id},
    {"status", to_string(rec.status)},
    {"current_iteration", rec.current_iteration()},
    {"iterations", rec.config.iterations},
    {"pending_env", rec.pending_env ? encode(*rec.pending_env) : json(nullptr)}};
}

}  // namespace

extern "C" {

const char * ard_version(void)
{
  return "0.1.0";
}

const char * ard_last_error(void)
{
  return g_last_error.c_str();
}

void ard_free(char * str)
{
  std::free(str);
}

ard_status ard_config_resolve(const char * config_json, const char * overrides_json, char ** out_json)
{
  if (out_json == nullptr) return invalid("out_json is null");
  return guarded([&] {
    const ExperimentConfig c = parse_experiment_config(view(config_json), view(overrides_json));
    *out_json = dup_string(encode(c).dump(2));
  });
}

ard_status ard_session_create(
  const char * config_json, const char * overrides_json, const char * session_id, ard_session ** out)
{
  if (out == nullptr) return invalid("out is null");
  return guarded([&] {
    const ExperimentConfig c = parse_experiment_config(view(config_json), view(overrides_json));
    const std::string id = session_id ? session_id : std::to_string(c.session.master_seed);
    auto h = std::make_unique<ard_session>();
    h->session = std::make_unique<Session>(c.session, id);
    *out = h.release();
  });
}

ard_status ard_session_open(const char * record_json, ard_session ** out)
{
  if (out == nullptr || record_json == nullptr) return invalid("record_json or out is null");
  return guarded([&] {
    auto h = std::make_unique<ard_session>();
    h->session = std::make_unique<Session>(Session::from_record(parse_record(record_json)));
    *out = h.release();
  });
}

void ard_session_destroy(ard_session * session)
{
  delete session;
}

ard_status ard_session_step(ard_session * session)
{
  if (session == nullptr) return invalid("session is null");
  return guarded([&] {
    if (session->session->status() != SessionStatus::kAwaitingDesign) throw StateError("session is finished");
    session->session->submit(session->session->simulated_design());
  });
}

ard_status ard_session_run(ard_session * session)
{
  if (session == nullptr) return invalid("session is null");
  return guarded([&] { session->session->run(); });
}

ard_status ard_session_submit(ard_session * session, const char * weights_json)
{
  if (session == nullptr || weights_json == nullptr) return invalid("session or weights_json is null");
  return guarded([&] {
    json j;
    try {
      j = json::parse(weights_json);
    } catch (const json::parse_error & e) {
      throw WeightFormatError(std::string("weights are not valid JSON: ") + e.what());
    }
    session->session->submit(decode_weights(j));
  });
}

ard_status ard_session_id(const ard_session * session, char ** out_id)
{
  if (session == nullptr || out_id == nullptr) return invalid("session or out_id is null");
  return guarded([&] { *out_id = dup_string(session->session->record().session_id); });
}

ard_status ard_session_status(const ard_session * session, char ** out_json)
{
  if (session == nullptr || out_json == nullptr) return invalid("session or out_json is null");
  return guarded([&] { *out_json = dup_string(status_json(*session->session).dump(2)); });
}

ard_status ard_session_record(const ard_session * session, char ** out_json)
{
  if (session == nullptr || out_json == nullptr) return invalid("session or out_json is null");
  return guarded([&] { *out_json = dup_string(dump_record(session->session->record())); });
}

ard_status ard_session_evaluate(const ard_session * session, char ** out_json)
{
  if (session == nullptr || out_json == nullptr) return invalid("session or out_json is null");
  return guarded([&] { *out_json = dup_string(encode(session->session->evaluate()).dump(2)); });
}

ard_status ard_session_propose(const ard_session * session, const char * method, uint64_t seed, char ** out_json)
{
  if (session == nullptr || out_json == nullptr) return invalid("session or out_json is null");
  return guarded([&] {
    const AcquisitionMethod m =
      method ? parse_acquisition_method(method) : session->session->config().method;
    *out_json = dup_string(encode(session->session->propose(m, seed)).dump(2));
  });
}

ard_status ard_session_save(const ard_session * session, const char * path)
{
  if (session == nullptr || path == nullptr) return invalid("session or path is null");
  return guarded([&] { write_text_atomic(path, dump_record(session->session->record())); });
}

ard_status ard_suite_run(
  const char * config_json, const char * overrides_json, const char * out_dir, char ** out_summary_json)
{
  if (out_dir == nullptr) return invalid("out_dir is null");
  return guarded([&] {
    const ExperimentConfig c = parse_experiment_config(view(config_json), view(overrides_json));
    const SuiteResult result = run_experiment_suite(c.suite);
    write_suite_outputs(result, out_dir);
    if (out_summary_json != nullptr) *out_summary_json = dup_string(suite_to_json(result).dump(2));
  });
}

ard_status ard_service_create(const char * config_json, const char * out_dir, ard_service ** out)
{
  if (out == nullptr || out_dir == nullptr) return invalid("out_dir or out is null");
  return guarded([&] {
    ServiceConfig cfg;
    cfg.out_dir = out_dir;
    cfg.config_text = config_json ? config_json : "";
    auto h = std::make_unique<ard_service>();
    h->service = std::make_unique<SessionService>(std::move(cfg));
    *out = h.release();
  });
}

ard_status ard_service_bind(ard_service * service, const char * host, int port, int * bound_port)
{
  if (service == nullptr) return invalid("service is null");
  return guarded([&] {
    const int p = service->service->bind(host ? host : "127.0.0.1", port);
    if (p < 0) throw Error("cannot bind port " + std::to_string(port));
    if (bound_port != nullptr) *bound_port = p;
  });
}

ard_status ard_service_listen(ard_service * service)
{
  if (service == nullptr) return invalid("service is null");
  return guarded([&] {
    if (!service->service->listen()) throw Error("service stopped with an error");
  });
}

ard_status ard_service_stop(ard_service * service)
{
  if (service == nullptr) return invalid("service is null");
  return guarded([&] { service->service->stop(); });
}

void ard_service_destroy(ard_service * service)
{
  delete service;
}

}  // extern "C"
