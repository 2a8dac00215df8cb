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

#ifndef REVO_ORCHESTRATOR_RUN_CONFIG_H_
#define REVO_ORCHESTRATOR_RUN_CONFIG_H_

#include <memory>
#include <string>

#include "json.hpp"
#include "revo/designer/designer.h"
#include "revo/designer/llm_backend.h"
#include "revo/designer/mock_backend.h"
#include "revo/evolution/evolution.h"

namespace revo::orchestrator {

struct BackendConfig {
  std::string kind = "mock";  // mock | llm
  designer::MockOptions mock;
  designer::LlmConfig llm;
};

struct FeedbackConfig {
  int quorum = 5;  // judged pairs each new individual needs before selection
  double cross_generation = 0.5;
  double ticket_ttl_seconds = 600.0;
  bool allow_self_pairs = false;
  // After the run finishes, keep issuing pairs over every individual.
  bool final_ranking = false;
};

struct RunConfig {
  std::string run_id;  // derived from task/search/mode/seed when empty
  std::string mode = "auto";  // auto | human
  evolution::RunSpec spec;
  BackendConfig backend;
  FeedbackConfig feedback;
  std::string data_dir = "revo-data";
  std::string bind = "127.0.0.1:8080";
};

// Throws ConfigError on unknown fields, wrong types or invalid values.
RunConfig RunConfigFromJson(const nlohmann::json& j);
nlohmann::json RunConfigToJson(const RunConfig& config);
RunConfig LoadRunConfig(const std::string& path);
void CheckRunConfig(const RunConfig& config);

std::string DefaultRunId(const RunConfig& config);

std::unique_ptr<designer::Backend> MakeBackend(const BackendConfig& config);

// Splits "host:port". Throws ConfigError.
std::pair<std::string, int> ParseBind(const std::string& bind);

}  // namespace revo::orchestrator

#endif  // REVO_ORCHESTRATOR_RUN_CONFIG_H_
