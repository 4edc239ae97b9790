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

#include <CLI11.hpp>

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code(ard_status s)
{
  switch (s) {
    case ARD_OK:
      return kExitOk;
    case ARD_ERR_CONFIG:
    case ARD_ERR_INVALID_ARGUMENT:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

int report(ard_status s, const char * what)
{
  if (s != ARD_OK) std::cerr << "error: " << what << ": " << ard_last_error() << "\n";
  return exit_code(s);
}

std::optional<std::string> read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quoted(const std::string & s)
{
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Builds {"session": {...}, "suite": {...}} from the flags that were given.
std::string overrides(
  const std::optional<std::uint64_t> & seed, const std::string & method, const std::vector<std::uint64_t> & seeds,
  const std::vector<std::string> & methods)
{
  std::vector<std::string> session;
  if (seed) session.push_back("\"master_seed\": " + std::to_string(*seed));
  if (!method.empty()) session.push_back("\"method\": " + quoted(method));
  std::vector<std::string> suite;
  if (!seeds.empty()) {
    std::string a = "\"seeds\": [";
    for (std::size_t i = 0; i < seeds.size(); ++i) a += (i ? ", " : "") + std::to_string(seeds[i]);
    suite.push_back(a + "]");
  }
  if (!methods.empty()) {
    std::string a = "\"methods\": [";
    for (std::size_t i = 0; i < methods.size(); ++i) a += (i ? ", " : "") + quoted(methods[i]);
    suite.push_back(a + "]");
  }
  auto join = [](const std::vector<std::string> & parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
    return s;
  };
  std::string out = "{";
  if (!session.empty()) out += "\"session\": {" + join(session) + "}";
  if (!suite.empty()) out += std::string(session.empty() ? "" : ", ") + "\"suite\": {" + join(suite) + "}";
  return out + "}";
}

struct Owned
{
  char * p{nullptr};
  ~Owned() { ard_free(p); }
};

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Assisted reward design: simulated sessions, experiment suites and the design service"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ard_version()));

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string session_path;
  std::string session_id;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods;
  int port = 8732;
  std::string host = "127.0.0.1";

  auto * simulate = app.add_subcommand("simulate", "run one session with the simulated designer");
  simulate->add_option("--config", config_path, "experiment config (JSON)");
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--out-dir", out_dir, "output directory");
  simulate->add_option("--method", method, "max_info | difficulty | random");
  simulate->add_option("--id", session_id, "session id (default: the seed)");

  auto * suite = app.add_subcommand("suite", "run methods x seeds and write suite_summary.csv");
  suite->add_option("--config", config_path, "experiment config (JSON)");
  suite->add_option("--out-dir", out_dir, "output directory");
  suite->add_option("--seeds", seeds, "override the suite seeds");
  suite->add_option("--methods", methods, "override the suite methods");

  auto * evaluate = app.add_subcommand("evaluate", "recompute the evaluation of a stored session");
  evaluate->add_option("--session", session_path, "session_<id>.json")->required();

  auto * propose = app.add_subcommand("propose", "one acquisition step on a stored session's belief");
  propose->add_option("--session", session_path, "session_<id>.json")->required();
  propose->add_option("--method", method, "max_info | difficulty | random (default: the session's)");
  propose->add_option("--seed", seed, "candidate seed");

  auto * serve = app.add_subcommand("serve", "start the HTTP design service");
  serve->add_option("--config", config_path, "defaults for new sessions (JSON)");
  serve->add_option("--out-dir", out_dir, "session storage directory");
  serve->add_option("--port", port, "listening port");
  serve->add_option("--host", host, "listening address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  std::string config_text;
  if (!config_path.empty()) {
    auto text = read_file(config_path);
    if (!text) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return kExitConfig;
    }
    config_text = *text;
  }
  const char * cfg = config_text.empty() ? nullptr : config_text.c_str();

  if (simulate->parsed()) {
    const std::string ov = overrides(seed, method, {}, {});
    ard_session * s = nullptr;
    ard_status st = ard_session_create(cfg, ov.c_str(), session_id.empty() ? nullptr : session_id.c_str(), &s);
    if (st != ARD_OK) return report(st, "simulate");
    st = ard_session_run(s);
    if (st == ARD_OK) {
      Owned id;
      ard_session_id(s, &id.p);
      std::filesystem::create_directories(out_dir);
      const std::string path = (std::filesystem::path(out_dir) / ("session_" + std::string(id.p) + ".json")).string();
      st = ard_session_save(s, path.c_str());
      if (st == ARD_OK) std::cout << path << "\n";
    }
    ard_session_destroy(s);
    return report(st, "simulate");
  }

  if (suite->parsed()) {
    const std::string ov = overrides(std::nullopt, "", seeds, methods);
    Owned summary;
    const ard_status st = ard_suite_run(cfg, ov.c_str(), out_dir.c_str(), &summary.p);
    if (st == ARD_OK) {
      std::cout << (std::filesystem::path(out_dir) / "suite_summary.csv").string() << "\n";
    }
    return report(st, "suite");
  }

  if (evaluate->parsed() || propose->parsed()) {
    auto text = read_file(session_path);
    if (!text) {
      std::cerr << "error: cannot read session '" << session_path << "'\n";
      return kExitConfig;
    }
    ard_session * s = nullptr;
    ard_status st = ard_session_open(text->c_str(), &s);
    if (st != ARD_OK) return report(st, "open session");
    Owned out;
    if (evaluate->parsed()) {
      st = ard_session_evaluate(s, &out.p);
    } else {
      st = ard_session_propose(s, method.empty() ? nullptr : method.c_str(), seed.value_or(0), &out.p);
    }
    if (st == ARD_OK) std::cout << out.p << "\n";
    ard_session_destroy(s);
    return report(st, evaluate->parsed() ? "evaluate" : "propose");
  }

  if (serve->parsed()) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    ard_service * svc = nullptr;
    ard_status st = ard_service_create(cfg, out_dir.c_str(), &svc);
    if (st != ARD_OK) return report(st, "serve");
    int bound = 0;
    st = ard_service_bind(svc, host.c_str(), port, &bound);
    if (st != ARD_OK) {
      ard_service_destroy(svc);
      return report(st, "serve");
    }
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&set, &sig);
      ard_service_stop(svc);
    });
    st = ard_service_listen(svc);
    if (waiter.joinable()) {
      pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
    }
    ard_service_destroy(svc);
    return report(st, "serve");
  }
  std::cerr << app.help();
  return kExitConfig;
}
