// Copyright 2026 The Revo Authors.
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

#ifndef REVO_ORCHESTRATOR_SERVICE_H_
#define REVO_ORCHESTRATOR_SERVICE_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "revo/orchestrator/feedback_hub.h"
#include "revo/orchestrator/run_config.h"
#include "revo/orchestrator/store.h"

namespace httplib {
class Server;
}

namespace revo::orchestrator {

// Live view of one run shared by the evolution loop (the only writer of
// checkpoints) and the HTTP handlers.
class RunHandle {
 public:
  explicit RunHandle(RunConfig config);

  const RunConfig& config() const { return config_; }
  RunStore& store() { return *store_; }
  FeedbackHub& hub() { return *hub_; }

  void SetState(const std::string& state, const std::string& error = "");
  std::string state() const;
  // Refreshes generation, best individual and known ids from a checkpoint.
  void Observe(const nlohmann::json& checkpoint);
  std::vector<std::string> IndividualIds() const;

  nlohmann::json Summary() const;
  nlohmann::json Status() const;
  nlohmann::json RatingsJson() const;

 private:
  RunConfig config_;
  std::unique_ptr<RunStore> store_;
  std::unique_ptr<FeedbackHub> hub_;
  mutable std::mutex mu_;
  std::string state_ = "created";  // created | running | waiting_for_feedback | finished | stopped | failed
  std::string error_;
  int generation_ = 0;
  std::optional<double> best_sigma_;
  std::string best_id_;
  std::vector<std::string> ids_;
};

// Handles for every run stored under data_dir/runs. Finished runs with
// final_ranking set start issuing ranking pairs.
std::vector<std::shared_ptr<RunHandle>> LoadRunHandles(const std::string& data_dir);

class Service {
 public:
  Service();
  ~Service();

  void AddRun(std::shared_ptr<RunHandle> run);
  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. Throws ConfigError when binding fails.
  int Start(const std::string& host, int port);
  void Stop();
  int port() const { return port_; }

  // Request handling without a socket, for tests and the CLI.
  struct Response {
    int status = 200;
    nlohmann::json body;
  };
  Response Handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body);

 private:
  std::shared_ptr<RunHandle> Find(const std::string& run_id) const;

  mutable std::mutex mu_;
  std::vector<std::shared_ptr<RunHandle>> runs_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace revo::orchestrator

#endif  // REVO_ORCHESTRATOR_SERVICE_H_
