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
#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>
#include <vector>

using namespace ard;
using namespace std::chrono_literals;

namespace
{

const char * kSmallConfig = R"({
  "planner": {"opt_steps": 40, "restarts": 1},
  "belief": {"n_particles": 20},
  "acquisition": {"n_candidates": 3, "n_inner": 2},
  "designer_model": {"n_normalizer_samples": 8},
  "evaluation": {"n_eval_envs": 4, "ratio_envs": 2, "ratio_particles": 4, "n_probe_envs": 3},
  "session": {"iterations": 2}
})";

std::filesystem::path fresh_dir(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("ard_service_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ServiceConfig small_service(const std::filesystem::path & dir)
{
  ServiceConfig c;
  c.out_dir = dir;
  c.config_text = kSmallConfig;
  return c;
}

json design_body(const WeightVector & w)
{
  return {{"weights", encode_weights(w)}};
}

WeightVector design_a()
{
  return ard::test::weights({-0.3, -0.1, 0.5, -0.4, -0.3, -0.6});
}

WeightVector design_b()
{
  return ard::test::weights({-0.5, -0.2, 0.6, -0.5, -0.2, -0.4});
}

std::string create(SessionService & svc, const std::string & id)
{
  const ServiceResponse r = svc.create_session(json{{"session_id", id}}.dump());
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return r.body["session_id"].get<std::string>();
}

}  // namespace

TEST(Service, CreateThenGetIsAwaitingWithPendingEnv)
{
  const auto dir = fresh_dir("create");
  SessionService svc(small_service(dir));
  const ServiceResponse c = svc.handle("POST", "/sessions", "");
  ASSERT_EQ(c.status, 201) << c.body.dump();
  const std::string id = c.body["session_id"];
  const ServiceResponse g = svc.handle("GET", "/sessions/" + id, "");
  ASSERT_EQ(g.status, 200);
  EXPECT_EQ(g.body["status"], "awaiting_design");
  EXPECT_FALSE(g.body["pending_env"].is_null());
  EXPECT_EQ(g.body["current_iteration"], 0);
  EXPECT_EQ(g.body["designer"], "human");
  EXPECT_EQ(g.body["feature_names"].size(), 6u);
  EXPECT_TRUE(g.body["history"].empty());
  EXPECT_TRUE(std::filesystem::exists(dir / ("session_" + id + ".json")));
}

TEST(Service, MisspelledWeightKeyIs422NamingTheKey)
{
  const auto dir = fresh_dir("badkey");
  SessionService svc(small_service(dir));
  const std::string id = create(svc, "k");
  json body = design_body(design_a());
  body["weights"].erase("speed");
  body["weights"]["speedd"] = -0.3;
  const ServiceResponse r = svc.handle("POST", "/sessions/k/design", body.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_NE(r.body["error"].get<std::string>().find("speedd"), std::string::npos);

  EXPECT_EQ(svc.handle("POST", "/sessions/k/design", "{not json").status, 422);
  EXPECT_EQ(svc.handle("POST", "/sessions/k/design", R"({"weights": {"speed": 1}})").status, 422);
  json wrong_scope = design_body(design_a());
  wrong_scope["scope"] = "independent";
  EXPECT_EQ(svc.handle("POST", "/sessions/k/design", wrong_scope.dump()).status, 422);
  EXPECT_EQ(svc.handle("GET", "/sessions/k", "").body["current_iteration"], 0);
}

TEST(Service, UnknownSessionIs404)
{
  SessionService svc(small_service(fresh_dir("404")));
  EXPECT_EQ(svc.handle("GET", "/sessions/nope", "").status, 404);
  EXPECT_EQ(svc.handle("GET", "/sessions/nope/proposal", "").status, 404);
  EXPECT_EQ(svc.handle("GET", "/sessions/nope/metrics", "").status, 404);
  EXPECT_EQ(svc.handle("POST", "/sessions/nope/design", design_body(design_a()).dump()).status, 404);
  EXPECT_EQ(svc.handle("GET", "/elsewhere", "").status, 404);
}

TEST(Service, CreateValidation)
{
  SessionService svc(small_service(fresh_dir("createval")));
  EXPECT_EQ(svc.create_session(R"({"config": {"session": {"iterations": 0}}})").status, 422);
  EXPECT_EQ(svc.create_session(R"({"colour": 1})").status, 422);
  EXPECT_EQ(svc.create_session(R"({"session_id": "../x"})").status, 422);
  EXPECT_EQ(svc.create_session(R"({"session_id": "dup"})").status, 201);
  EXPECT_EQ(svc.create_session(R"({"session_id": "dup"})").status, 409);
  EXPECT_EQ(svc.session_count(), 1u);
}

TEST(Service, ConcurrentDesignsAdmitExactlyOne)
{
  SessionService svc(small_service(fresh_dir("concurrent")));
  const std::string id = create(svc, "c");
  const std::string body = design_body(design_a()).dump();
  std::atomic<int> accepted{0}, conflicts{0}, other{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      const int s = svc.handle("POST", "/sessions/c/design", body).status;
      if (s == 202) {
        ++accepted;
      } else if (s == 409) {
        ++conflicts;
      } else {
        ++other;
      }
    });
  }
  for (auto & t : threads) t.join();
  EXPECT_EQ(accepted.load(), 1);
  EXPECT_EQ(conflicts.load(), 7);
  EXPECT_EQ(other.load(), 0);
  ASSERT_TRUE(svc.wait_idle(id, 120s));
  EXPECT_EQ(svc.handle("GET", "/sessions/c", "").body["current_iteration"], 1);
}

TEST(Service, ProposalPreviewsFollowTheSubmittedDesign)
{
  SessionService svc(small_service(fresh_dir("computing")));
  const std::string id = create(svc, "p");
  const ServiceResponse before = svc.handle("GET", "/sessions/p/proposal", "");
  ASSERT_EQ(before.status, 200);
  EXPECT_TRUE(before.body["preview"]["last_submitted"].is_null());
  EXPECT_FALSE(before.body["preview"]["map"]["frames"].empty());

  const ServiceResponse accepted = svc.handle("POST", "/sessions/p/design", design_body(design_a()).dump());
  ASSERT_EQ(accepted.status, 202);
  EXPECT_EQ(accepted.body["status"], "computing_proposal");
  EXPECT_TRUE(accepted.body["pending_env"].is_null());
  ASSERT_TRUE(svc.wait_idle(id, 120s));

  const ServiceResponse after = svc.handle("GET", "/sessions/p/proposal", "");
  ASSERT_EQ(after.status, 200);
  const json & last = after.body["preview"]["last_submitted"];
  ASSERT_FALSE(last.is_null());
  EXPECT_EQ(decode_weights(last["weights"]), design_a());
  // One frame per timestep: initial state plus the planning horizon.
  EXPECT_EQ(last["frames"].size(), 11u);
  EXPECT_NE(after.body["pending_env"], before.body["pending_env"]);
}

TEST(Service, FinishedSessionRejectsDesigns)
{
  SessionService svc(small_service(fresh_dir("finished")));
  const std::string id = create(svc, "f");
  for (const auto & w : {design_a(), design_b()}) {
    ASSERT_EQ(svc.submit_design(id, design_body(w).dump()).status, 202);
    ASSERT_TRUE(svc.wait_idle(id, 120s));
  }
  EXPECT_EQ(svc.get_session(id).body["status"], "finished");
  EXPECT_EQ(svc.submit_design(id, design_body(design_a()).dump()).status, 409);
  EXPECT_EQ(svc.get_proposal(id).status, 409);

  const ServiceResponse m = svc.get_metrics(id);
  ASSERT_EQ(m.status, 200);
  EXPECT_EQ(m.body["entropy"].size(), 2u);
  EXPECT_EQ(m.body["proxy_violations"].size(), 2u);
  EXPECT_TRUE(m.body["mean_regret"][0].is_null());
  EXPECT_EQ(svc.get_session(id).body["history"].size(), 2u);
}

TEST(Service, ResumesAfterRestartWithSamePendingEnv)
{
  const auto dir = fresh_dir("restart");
  json pending;
  {
    SessionService svc(small_service(dir));
    const std::string id = create(svc, "r");
    ASSERT_EQ(svc.submit_design(id, design_body(design_a()).dump()).status, 202);
    ASSERT_TRUE(svc.wait_idle(id, 120s));
    pending = svc.get_session(id).body["pending_env"];
    ASSERT_FALSE(pending.is_null());
  }
  SessionService again(small_service(dir));
  EXPECT_EQ(again.session_count(), 1u);
  const ServiceResponse g = again.get_session("r");
  ASSERT_EQ(g.status, 200);
  EXPECT_EQ(g.body["status"], "awaiting_design");
  EXPECT_EQ(g.body["current_iteration"], 1);
  EXPECT_EQ(g.body["pending_env"], pending);
  EXPECT_EQ(again.submit_design("r", design_body(design_b()).dump()).status, 202);
  ASSERT_TRUE(again.wait_idle("r", 120s));
  EXPECT_EQ(again.get_session("r").body["status"], "finished");
}

TEST(Service, RoundTripMatchesLibrarySession)
{
  const auto dir = fresh_dir("equivalence");
  SessionService svc(small_service(dir));
  const std::string id = create(svc, "eq");
  for (const auto & w : {design_a(), design_b()}) {
    ASSERT_EQ(svc.submit_design(id, design_body(w).dump()).status, 202);
    ASSERT_TRUE(svc.wait_idle(id, 120s));
  }
  const std::string stored = read_text_file(dir / "session_eq.json");

  SessionConfig cfg = parse_experiment_config(kSmallConfig).session;
  cfg.designer = DesignerKind::kHuman;
  Session lib(cfg, "eq");
  lib.submit(design_a());
  lib.submit(design_b());
  EXPECT_EQ(stored, dump_record(lib.record()));
}

TEST(Service, SimulatedDefaultsDriveTheSamePathAsRunSession)
{
  // With a simulated designer in the defaults, submitting what the simulated designer would
  // have submitted reproduces run_session.
  const auto dir = fresh_dir("simulated");
  json cfg = json::parse(kSmallConfig);
  cfg["session"]["designer"] = "simulated";
  ServiceConfig sc;
  sc.out_dir = dir;
  sc.config_text = cfg.dump();
  SessionService svc(sc);
  const std::string id = create(svc, "sim");
  const SessionConfig lib_cfg = parse_experiment_config(cfg.dump()).session;
  Session shadow(lib_cfg, "sim");
  while (shadow.status() == SessionStatus::kAwaitingDesign) {
    const WeightVector w = shadow.simulated_design();
    ASSERT_EQ(svc.submit_design(id, design_body(w).dump()).status, 202);
    ASSERT_TRUE(svc.wait_idle(id, 120s));
    shadow.submit(w);
  }
  EXPECT_EQ(read_text_file(dir / "session_sim.json"), dump_record(run_session(lib_cfg, "sim")));
  EXPECT_FALSE(svc.get_metrics(id).body["mean_regret"][0].is_null());
}

TEST(Service, RealSocketRoundTrip)
{
  SessionService svc(small_service(fresh_dir("socket")));
  const int port = svc.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread server([&] { svc.listen(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(60, 0);

  auto created = cli.Post("/sessions", R"({"session_id": "net"})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");

  auto bad = cli.Post("/sessions/net/design", R"({"weights": {"speedd": 1}})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 422);

  auto ok = cli.Post("/sessions/net/design", design_body(design_a()).dump(), "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 202);
  json state;
  for (int i = 0; i < 2400; ++i) {
    auto g = cli.Get("/sessions/net");
    ASSERT_TRUE(g);
    state = json::parse(g->body);
    if (state["status"] != "computing_proposal") break;
    std::this_thread::sleep_for(50ms);
  }
  EXPECT_EQ(state["status"], "awaiting_design");
  EXPECT_EQ(state["current_iteration"], 1);

  auto proposal = cli.Get("/sessions/net/proposal");
  ASSERT_TRUE(proposal);
  EXPECT_EQ(proposal->status, 200);
  auto metrics = cli.Get("/sessions/net/metrics");
  ASSERT_TRUE(metrics);
  EXPECT_EQ(json::parse(metrics->body)["entropy"].size(), 1u);
  auto options = cli.Options("/sessions");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);

  svc.stop();
  server.join();
}
