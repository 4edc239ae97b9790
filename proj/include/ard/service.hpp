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

#ifndef ARD__SERVICE_HPP_
#define ARD__SERVICE_HPP_

#include "ard/orchestrator.hpp"
#include "ard/serialization.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace ard
{

struct ServiceConfig
{
  std::filesystem::path out_dir{"."};
  /// Defaults for new sessions; POST /sessions bodies are merge-patched over them.
  std::string config_text;
  std::string cors_origin{"*"};
  std::filesystem::path static_dir;  ///< optional console assets served at /
};

struct ServiceResponse
{
  int status{200};
  json body;
};

/// Human-designer sessions over HTTP. Requests are routed through handle() so the
/// behaviour can be exercised without a socket.
class SessionService
{
public:
  explicit SessionService(ServiceConfig cfg);
  ~SessionService();
  SessionService(const SessionService &) = delete;
  SessionService & operator=(const SessionService &) = delete;

  ServiceResponse handle(const std::string & method, const std::string & path, const std::string & body);

  ServiceResponse create_session(const std::string & body);
  ServiceResponse get_session(const std::string & id);
  ServiceResponse get_proposal(const std::string & id);
  ServiceResponse submit_design(const std::string & id, const std::string & body);
  ServiceResponse get_metrics(const std::string & id);

  /// Blocks until the session leaves computing_proposal or the timeout expires.
  bool wait_idle(const std::string & id, std::chrono::milliseconds timeout);

  /// Binds the listening socket; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string & host, int port);
  /// Serves until stop(). Requires bind().
  bool listen();
  void stop();

  std::size_t session_count();

private:
  struct Entry
  {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    bool computing{false};
    std::string last_error;
    std::thread worker;
    std::optional<json> preview_cache;
  };

  std::shared_ptr<Entry> find(const std::string & id);
  json handle_json(const std::string & id, Entry & e) const;
  void persist(const Session & s) const;
  void load_persisted();

  ServiceConfig cfg_;
  json defaults_;
  std::mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_{1};

  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace ard

#endif  // ARD__SERVICE_HPP_
