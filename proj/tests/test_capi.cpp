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

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace
{

const char * kSmall = R"({
  "planner": {"opt_steps": 40, "restarts": 1},
  "belief": {"n_particles": 20},
  "acquisition": {"n_candidates": 3, "n_inner": 2},
  "designer_model": {"n_normalizer_samples": 8},
  "evaluation": {"n_eval_envs": 4, "ratio_envs": 2, "ratio_particles": 4, "n_probe_envs": 3},
  "session": {"iterations": 2},
  "suite": {"methods": ["max_info", "random"], "seeds": [1, 2]}
})";

struct Str
{
  char * p{nullptr};
  ~Str() { ard_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct CliResult
{
  int code{-1};
  std::string out;
};

CliResult run_cli(const std::string & args)
{
  const std::string cmd = std::string(ARD_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE * pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("ard_capi_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path small_config_file(const std::filesystem::path & dir)
{
  const auto path = dir / "small.json";
  std::ofstream(path) << kSmall;
  return path;
}

const char * kWeights = R"({"speed": -0.3, "control": -0.1, "lane": 0.5, "car": -0.4, "obstacle": -0.3, "fence": -0.6})";

}  // namespace

TEST(CApi, VersionAndResolve)
{
  EXPECT_STRNE(ard_version(), "");
  Str out;
  ASSERT_EQ(ard_config_resolve(nullptr, nullptr, &out.p), ARD_OK);
  const json c = json::parse(out.str());
  EXPECT_EQ(c["planner"]["horizon"], 10);
  EXPECT_EQ(ard_config_resolve(R"({"plannerr": {}})", nullptr, &out.p), ARD_ERR_CONFIG);
  EXPECT_NE(std::string(ard_last_error()).find("plannerr"), std::string::npos);
  EXPECT_EQ(ard_config_resolve(nullptr, nullptr, nullptr), ARD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SessionLifecycleAndStatusCodes)
{
  ard_session * s = nullptr;
  ASSERT_EQ(ard_session_create(kSmall, R"({"session": {"master_seed": 3}})", nullptr, &s), ARD_OK) << ard_last_error();
  Str id;
  ASSERT_EQ(ard_session_id(s, &id.p), ARD_OK);
  EXPECT_EQ(id.str(), "3");

  EXPECT_EQ(ard_session_submit(s, R"({"speedd": 1})"), ARD_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(ard_last_error()).find("speedd"), std::string::npos);
  EXPECT_EQ(ard_session_submit(s, "not json"), ARD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ard_session_submit(s, kWeights), ARD_OK) << ard_last_error();
  EXPECT_STREQ(ard_last_error(), "");

  Str status;
  ASSERT_EQ(ard_session_status(s, &status.p), ARD_OK);
  EXPECT_EQ(json::parse(status.str())["current_iteration"], 1);

  ASSERT_EQ(ard_session_step(s), ARD_OK);
  EXPECT_EQ(ard_session_step(s), ARD_ERR_STATE);
  EXPECT_EQ(ard_session_submit(s, kWeights), ARD_ERR_STATE);

  Str eval;
  ASSERT_EQ(ard_session_evaluate(s, &eval.p), ARD_OK);
  EXPECT_TRUE(json::parse(eval.str()).contains("regret"));
  Str proposal;
  ASSERT_EQ(ard_session_propose(s, "difficulty", 5, &proposal.p), ARD_OK);
  EXPECT_EQ(json::parse(proposal.str())["method"], "difficulty");
  EXPECT_EQ(ard_session_propose(s, "greedy", 5, &proposal.p), ARD_ERR_CONFIG);
  ard_session_destroy(s);
}

TEST(CApi, RecordReopensIdentically)
{
  ard_session * a = nullptr;
  ASSERT_EQ(ard_session_create(kSmall, nullptr, "reopen", &a), ARD_OK);
  ASSERT_EQ(ard_session_step(a), ARD_OK);
  Str rec;
  ASSERT_EQ(ard_session_record(a, &rec.p), ARD_OK);
  ard_session * b = nullptr;
  ASSERT_EQ(ard_session_open(rec.p, &b), ARD_OK) << ard_last_error();
  ASSERT_EQ(ard_session_run(a), ARD_OK);
  ASSERT_EQ(ard_session_run(b), ARD_OK);
  Str ra, rb;
  ard_session_record(a, &ra.p);
  ard_session_record(b, &rb.p);
  EXPECT_EQ(ra.str(), rb.str());
  ard_session_destroy(a);
  ard_session_destroy(b);

  ard_session * bad = nullptr;
  EXPECT_EQ(ard_session_open("{}", &bad), ARD_ERR_CONFIG);
  EXPECT_EQ(ard_session_open(nullptr, &bad), ARD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, NullHandles)
{
  EXPECT_EQ(ard_session_step(nullptr), ARD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ard_session_run(nullptr), ARD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ard_session_submit(nullptr, kWeights), ARD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ard_session_save(nullptr, "/tmp/x"), ARD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ard_service_bind(nullptr, nullptr, 0, nullptr), ARD_ERR_INVALID_ARGUMENT);
  ard_session_destroy(nullptr);
  ard_service_destroy(nullptr);
  ard_free(nullptr);
}

TEST(CApi, HumanSessionHasNoSimulatedStep)
{
  ard_session * s = nullptr;
  ASSERT_EQ(ard_session_create(kSmall, R"({"session": {"designer": "human"}})", "h", &s), ARD_OK) << ard_last_error();
  EXPECT_EQ(ard_session_step(s), ARD_ERR_RUNTIME);
  EXPECT_EQ(ard_session_submit(s, kWeights), ARD_OK);
  ard_session_destroy(s);
  EXPECT_EQ(
    ard_session_create(kSmall, R"({"session": {"designer": "human", "w_star": {"speed": 1, "control": 0, "lane": 0, "car": 0, "obstacle": 0, "fence": 0}}})", "h", &s),
    ARD_ERR_CONFIG);
}

TEST(CApi, SuiteWritesSummary)
{
  const auto dir = scratch("suite");
  Str summary;
  ASSERT_EQ(ard_suite_run(kSmall, nullptr, dir.c_str(), &summary.p), ARD_OK) << ard_last_error();
  EXPECT_TRUE(std::filesystem::exists(dir / "suite_summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "session_max_info_seed1.json"));
  EXPECT_TRUE(json::parse(summary.str()).is_object());
  EXPECT_EQ(ard_suite_run(kSmall, R"({"suite": {"methods": []}})", dir.c_str(), nullptr), ARD_ERR_CONFIG);
}

TEST(CApi, ServiceBindsAndStops)
{
  const auto dir = scratch("service");
  ard_service * svc = nullptr;
  ASSERT_EQ(ard_service_create(kSmall, dir.c_str(), &svc), ARD_OK) << ard_last_error();
  int port = 0;
  ASSERT_EQ(ard_service_bind(svc, "127.0.0.1", 0, &port), ARD_OK);
  EXPECT_GT(port, 0);
  EXPECT_EQ(ard_service_stop(svc), ARD_OK);
  ard_service_destroy(svc);
  EXPECT_EQ(ard_service_create("{bad", dir.c_str(), &svc), ARD_ERR_CONFIG);
}

TEST(Cli, UnknownSubcommandIsUsageError)
{
  const CliResult r = run_cli("frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, ConfigErrorsExitOne)
{
  const auto dir = scratch("cli_config");
  std::ofstream(dir / "bad.json") << R"({"planner": {"horizonn": 3}})";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string() + " --out-dir " + dir.string()).code, 1);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.json").string()).code, 1);
  EXPECT_EQ(run_cli("evaluate --session " + (dir / "missing.json").string()).code, 1);
  EXPECT_EQ(run_cli("simulate --seed notanumber").code, 1);
}

TEST(Cli, RuntimeErrorsExitTwo)
{
  const auto dir = scratch("cli_runtime");
  // All-zero truth leaves every evaluation environment degenerate.
  std::ofstream(dir / "zero.json")
    << R"({"planner": {"opt_steps": 20, "restarts": 1}, "belief": {"n_particles": 10}, "acquisition": {"n_candidates": 2, "n_inner": 2},
          "session": {"iterations": 1, "w_star": {"speed": 0, "control": 0, "lane": 0, "car": 0, "obstacle": 0, "fence": 0}}})";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "zero.json").string() + " --out-dir " + dir.string()).code, 2);
}

TEST(Cli, SimulateTwiceIsByteIdentical)
{
  const auto dir = scratch("cli_simulate");
  const std::string cfg = small_config_file(dir).string();
  const auto a = dir / "a";
  const auto b = dir / "b";
  const CliResult ra = run_cli("simulate --config " + cfg + " --seed 7 --out-dir " + a.string());
  const CliResult rb = run_cli("simulate --config " + cfg + " --seed 7 --out-dir " + b.string());
  ASSERT_EQ(ra.code, 0);
  ASSERT_EQ(rb.code, 0);
  EXPECT_EQ(ra.out, (a / "session_7.json").string() + "\n");
  const std::string ta = slurp(a / "session_7.json");
  ASSERT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(b / "session_7.json"));
  EXPECT_EQ(json::parse(ta)["config"]["session"]["master_seed"], 7);
}

TEST(Cli, EvaluateReplaysStoredMetrics)
{
  const auto dir = scratch("cli_evaluate");
  const std::string cfg = small_config_file(dir).string();
  ASSERT_EQ(run_cli("simulate --config " + cfg + " --seed 4 --out-dir " + dir.string()).code, 0);
  const auto session = dir / "session_4.json";
  const CliResult r = run_cli("evaluate --session " + session.string());
  ASSERT_EQ(r.code, 0);
  const json stored = json::parse(slurp(session))["final_evaluation"];
  EXPECT_EQ(json::parse(r.out), stored);
  EXPECT_EQ(json::parse(r.out).dump(), stored.dump());
}

TEST(Cli, ProposeOnStoredSession)
{
  const auto dir = scratch("cli_propose");
  const std::string cfg = small_config_file(dir).string();
  ASSERT_EQ(run_cli("simulate --config " + cfg + " --seed 5 --out-dir " + dir.string()).code, 0);
  const std::string s = (dir / "session_5.json").string();
  const CliResult a = run_cli("propose --session " + s + " --method random --seed 3");
  const CliResult b = run_cli("propose --session " + s + " --method random --seed 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out)["method"], "random");
  EXPECT_EQ(run_cli("propose --session " + s + " --method greedy").code, 1);
}

TEST(Cli, SuiteWritesOneRowPerMethodSeedIteration)
{
  const auto dir = scratch("cli_suite");
  const std::string cfg = small_config_file(dir).string();
  ASSERT_EQ(run_cli("suite --config " + cfg + " --out-dir " + dir.string()).code, 0);
  std::istringstream csv(slurp(dir / "suite_summary.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2 * 2 * 2);
  ASSERT_EQ(run_cli("suite --config " + cfg + " --out-dir " + dir.string() + " --seeds 9 --methods difficulty").code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "session_difficulty_seed9.json"));
}
