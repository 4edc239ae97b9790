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

#include "ard/service.hpp"

#include <httplib.h>

#include <condition_variable>
#include <iostream>
#include <regex>

namespace ard
{

struct SessionService::Http
{
  httplib::Server server;
};

namespace
{

ServiceResponse error_response(int status, const std::string & message)
{
  return {status, json{{"error", message}}};
}

bool valid_session_id(const std::string & id)
{
  static const std::regex re("^[A-Za-z0-9_-]{1,64}$");
  return std::regex_match(id, re);
}

json plan_preview(const WeightVector & w, const EnvironmentSpec & env, const PlannerConfig & planner)
{
  const Trajectory t = plan(w, env, planner);
  return {{"weights", encode_weights(w)}, {"frames", encode_frames(t, env)}, {"trajectory", encode_trajectory(t, w)}};
}

}  // namespace

SessionService::SessionService(ServiceConfig cfg) : cfg_(std::move(cfg)), http_(std::make_unique<Http>())
{
  const ExperimentConfig base = parse_experiment_config(cfg_.config_text);
  defaults_ = encode(base);
  defaults_.erase("suite");
  json raw = cfg_.config_text.empty() ? json::object() : json::parse(cfg_.config_text);
  const bool designer_given = raw.contains("session") && raw["session"].is_object() && raw["session"].contains("designer");
  if (!designer_given) {
    defaults_["session"]["designer"] = "human";
    defaults_["session"]["w_star"] = nullptr;
  }
  std::filesystem::create_directories(cfg_.out_dir);
  load_persisted();

  auto & svr = http_->server;
  svr.set_default_headers({
    {"Access-Control-Allow-Origin", cfg_.cors_origin},
    {"Access-Control-Allow-Headers", "Content-Type"},
    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  if (!cfg_.static_dir.empty()) svr.set_mount_point("/", cfg_.static_dir.string());
  auto forward = [this](const httplib::Request & req, httplib::Response & res) {
    const ServiceResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  svr.Options(".*", [](const httplib::Request &, httplib::Response & res) { res.status = 204; });
  svr.Get("/sessions.*", forward);
  svr.Post("/sessions.*", forward);
}

SessionService::~SessionService()
{
  stop();
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard<std::mutex> lock(map_mutex_);
    for (auto & [id, e] : sessions_) entries.push_back(e);
  }
  for (auto & e : entries) {
    std::thread t;
    {
      std::lock_guard<std::mutex> lock(e->mutex);
      t = std::move(e->worker);
    }
    if (t.joinable()) t.join();
  }
}

void SessionService::load_persisted()
{
  if (!std::filesystem::is_directory(cfg_.out_dir)) return;
  for (const auto & f : std::filesystem::directory_iterator(cfg_.out_dir)) {
    const std::string name = f.path().filename().string();
    if (name.rfind("session_", 0) != 0 || f.path().extension() != ".json") continue;
    try {
      auto s = std::make_unique<Session>(Session::from_record(parse_record(read_text_file(f.path()))));
      auto e = std::make_shared<Entry>();
      const std::string id = s->record().session_id;
      e->session = std::move(s);
      sessions_[id] = std::move(e);
    } catch (const std::exception & ex) {
      std::cerr << "skipping " << f.path() << ": " << ex.what() << "\n";
    }
  }
}

void SessionService::persist(const Session & s) const
{
  write_text_atomic(cfg_.out_dir / ("session_" + s.record().session_id + ".json"), dump_record(s.record()));
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string & id)
{
  std::lock_guard<std::mutex> lock(map_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionService::session_count()
{
  std::lock_guard<std::mutex> lock(map_mutex_);
  return sessions_.size();
}

json SessionService::handle_json(const std::string & id, Entry & e) const
{
  const auto & rec = e.session->record();
  const SessionStatus status = e.computing ? SessionStatus::kComputingProposal : rec.status;
  json names = json::array();
  for (const auto & n : FeatureSpace::base().names()) names.push_back(n);
  json h = {
    {"session_id", id},
    {"status", to_string(status)},
    {"current_iteration", rec.current_iteration()},
    {"iterations", rec.config.iterations},
    {"mode", to_string(rec.config.mode)},
    {"method", to_string(rec.config.method)},
    {"designer", to_string(rec.config.designer)},
    {"feature_names", names},
    {"pending_env", status == SessionStatus::kAwaitingDesign && rec.pending_env ? encode(*rec.pending_env) : json(nullptr)}};
  if (!e.last_error.empty()) h["last_error"] = e.last_error;
  return h;
}

ServiceResponse SessionService::handle(const std::string & method, const std::string & path, const std::string & body)
{
  static const std::regex session_re("^/sessions/([^/]+)$");
  static const std::regex sub_re("^/sessions/([^/]+)/(proposal|design|metrics)$");
  try {
    std::smatch m;
    if (path == "/sessions") {
      if (method == "POST") return create_session(body);
      return error_response(405, "method not allowed");
    }
    if (std::regex_match(path, m, session_re)) {
      if (method == "GET") return get_session(m[1]);
      return error_response(405, "method not allowed");
    }
    if (std::regex_match(path, m, sub_re)) {
      const std::string id = m[1];
      const std::string what = m[2];
      if (what == "design") {
        if (method == "POST") return submit_design(id, body);
      } else if (method == "GET") {
        return what == "proposal" ? get_proposal(id) : get_metrics(id);
      }
      return error_response(405, "method not allowed");
    }
    return error_response(404, "no such endpoint");
  } catch (const std::exception & ex) {
    return error_response(500, ex.what());
  }
}

ServiceResponse SessionService::create_session(const std::string & body)
{
  json req = json::object();
  if (!body.empty()) {
    try {
      req = json::parse(body);
    } catch (const json::parse_error & ex) {
      return error_response(422, std::string("body is not valid JSON: ") + ex.what());
    }
  }
  if (!req.is_object()) return error_response(422, "body must be a JSON object");
  for (const auto & item : req.items()) {
    if (item.key() != "config" && item.key() != "session_id") {
      return error_response(422, "unknown key '" + item.key() + "'");
    }
  }
  json doc = defaults_;
  if (req.contains("config")) {
    if (!req["config"].is_object()) return error_response(422, "config must be an object");
    doc.merge_patch(req["config"]);
  }
  std::unique_ptr<Session> session;
  std::string id;
  {
    std::lock_guard<std::mutex> lock(map_mutex_);
    if (req.contains("session_id")) {
      if (!req["session_id"].is_string() || !valid_session_id(req["session_id"].get<std::string>())) {
        return error_response(422, "session_id must match [A-Za-z0-9_-]{1,64}");
      }
      id = req["session_id"].get<std::string>();
      if (sessions_.count(id)) return error_response(409, "session '" + id + "' already exists");
    } else {
      do {
        id = "s" + std::to_string(next_id_++);
      } while (sessions_.count(id));
    }
    try {
      session = std::make_unique<Session>(decode_session_config(doc), id);
    } catch (const ConfigError & ex) {
      return error_response(422, ex.what());
    }
    persist(*session);
    auto e = std::make_shared<Entry>();
    e->session = std::move(session);
    sessions_[id] = e;
  }
  auto e = find(id);
  std::lock_guard<std::mutex> lock(e->mutex);
  return {201, handle_json(id, *e)};
}

ServiceResponse SessionService::get_session(const std::string & id)
{
  auto e = find(id);
  if (!e) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard<std::mutex> lock(e->mutex);
  json h = handle_json(id, *e);
  json history = json::array();
  for (const auto & entry : e->session->record().entries) {
    history.push_back({
      {"iteration", entry.iteration},
      {"proxy", encode(entry.proxy)},
      {"entropy", entry.entropy},
      {"posterior_mean", encode_weights(entry.posterior_mean)},
      {"map_estimate", encode_weights(entry.map_estimate)},
      {"proxy_violations", encode(entry.proxy_violations)},
      {"acquisition",
       {{"method", to_string(entry.acquisition.method)}, {"index", entry.acquisition.index},
        {"score", entry.acquisition.score}, {"per_candidate_scores", entry.acquisition.per_candidate_scores},
        {"env", encode(entry.acquisition.env)}}}});
  }
  h["history"] = history;
  return {200, h};
}

ServiceResponse SessionService::get_proposal(const std::string & id)
{
  auto e = find(id);
  if (!e) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard<std::mutex> lock(e->mutex);
  const auto & rec = e->session->record();
  if (e->computing || rec.status != SessionStatus::kAwaitingDesign || !rec.pending_env) {
    ServiceResponse r = error_response(409, "no pending proposal");
    r.body["status"] = to_string(e->computing ? SessionStatus::kComputingProposal : rec.status);
    return r;
  }
  if (!e->preview_cache) {
    const auto & planner = rec.config.planner;
    json preview = {
      {"last_submitted", rec.entries.empty() ? json(nullptr)
                                             : plan_preview(rec.entries.back().proxy.weights, *rec.pending_env, planner)},
      {"map", plan_preview(rec.belief.map_estimate(), *rec.pending_env, planner)}};
    e->preview_cache = json{
      {"session_id", id}, {"iteration", rec.current_iteration()}, {"pending_env", encode(*rec.pending_env)},
      {"preview", preview}};
  }
  return {200, *e->preview_cache};
}

ServiceResponse SessionService::submit_design(const std::string & id, const std::string & body)
{
  auto e = find(id);
  if (!e) return error_response(404, "unknown session '" + id + "'");
  json req;
  try {
    req = json::parse(body);
  } catch (const json::parse_error & ex) {
    return error_response(422, std::string("body is not valid JSON: ") + ex.what());
  }
  if (!req.is_object()) return error_response(422, "body must be a JSON object");
  for (const auto & item : req.items()) {
    if (item.key() != "weights" && item.key() != "scope") return error_response(422, "unknown key '" + item.key() + "'");
  }
  if (!req.contains("weights")) return error_response(422, "missing 'weights'");
  WeightVector w;
  try {
    w = decode_weights(req["weights"]);
  } catch (const WeightFormatError & ex) {
    return error_response(422, ex.what());
  }

  std::lock_guard<std::mutex> lock(e->mutex);
  Session & current = *e->session;
  if (req.contains("scope")) {
    if (!req["scope"].is_string() || req["scope"].get<std::string>() != to_string(current.config().mode)) {
      return error_response(422, "scope must be '" + std::string(to_string(current.config().mode)) + "' for this session");
    }
  }
  if (e->computing) return error_response(409, "a design is already being processed");
  if (current.status() != SessionStatus::kAwaitingDesign) {
    return error_response(409, "session is " + std::string(to_string(current.status())));
  }
  e->computing = true;
  e->last_error.clear();
  e->preview_cache.reset();
  if (e->worker.joinable()) e->worker.join();
  auto work = std::make_shared<Session>(current);
  e->worker = std::thread([this, e, work, w]() {
    try {
      work->submit(w);
      std::lock_guard<std::mutex> guard(e->mutex);
      *e->session = std::move(*work);
      e->computing = false;
      persist(*e->session);
    } catch (const std::exception & ex) {
      std::lock_guard<std::mutex> guard(e->mutex);
      e->computing = false;
      e->last_error = ex.what();
    }
  });
  return {202, handle_json(id, *e)};
}

ServiceResponse SessionService::get_metrics(const std::string & id)
{
  auto e = find(id);
  if (!e) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard<std::mutex> lock(e->mutex);
  const auto & rec = e->session->record();
  json entropy = json::array(), proxy_v = json::array(), post_v = json::array(), regret = json::array();
  for (const auto & entry : rec.entries) {
    entropy.push_back(entry.entropy);
    proxy_v.push_back(encode(entry.proxy_violations));
    post_v.push_back(encode(entry.posterior_violations));
    regret.push_back(entry.regret ? json(entry.regret->mean) : json(nullptr));
  }
  return {
    200,
    {{"session_id", id},
     {"current_iteration", rec.current_iteration()},
     {"n_probe_envs", rec.config.evaluation.n_probe_envs},
     {"current_entropy", ard::entropy(rec.belief)},
     {"entropy", entropy},
     {"proxy_violations", proxy_v},
     {"posterior_violations", post_v},
     {"mean_regret", regret}}};
}

bool SessionService::wait_idle(const std::string & id, std::chrono::milliseconds timeout)
{
  auto e = find(id);
  if (!e) return false;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    {
      std::lock_guard<std::mutex> lock(e->mutex);
      if (!e->computing) return true;
    }
    if (std::chrono::steady_clock::now() > deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

int SessionService::bind(const std::string & host, int port)
{
  if (port == 0) return http_->server.bind_to_any_port(host);
  return http_->server.bind_to_port(host, port) ? port : -1;
}

bool SessionService::listen()
{
  return http_->server.listen_after_bind();
}

void SessionService::stop()
{
  if (http_) http_->server.stop();
}

}  // namespace ard
