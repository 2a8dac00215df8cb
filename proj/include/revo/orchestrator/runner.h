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

#ifndef REVO_ORCHESTRATOR_RUNNER_H_
#define REVO_ORCHESTRATOR_RUNNER_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "revo/evolution/evolution.h"
#include "revo/orchestrator/run_config.h"
#include "revo/orchestrator/service.h"

namespace revo::orchestrator {

struct RunOptions {
  // Polled between pipelines and while waiting for human judgments.
  std::function<bool()> interrupt;
  // Serve the HTTP API during the run; human mode always serves.
  bool serve = false;
  // Called once the service listens, with the bound port.
  std::function<void(int)> on_listening;
  std::ostream* log = nullptr;
};

struct RunOutcome {
  evolution::EvolutionResult result;
  std::string run_dir;
};

// Starts a new run under config.data_dir/runs/<run id>. Throws ConfigError
// when that run already has a checkpoint, evolution::Interrupted when
// interrupted (the checkpoint is kept), and whatever the run raises.
RunOutcome StartRun(const RunConfig& config, const RunOptions& options = {});
// Continues a run from its checkpoint. Throws CheckpointError.
RunOutcome ResumeRun(const std::string& data_dir, const std::string& run_id,
                     const RunOptions& options = {});

struct BenchOptions {
  std::vector<std::string> tasks = {"latch", "drive"};
  int seeds = 10;
  uint64_t first_seed = 0;
  evolution::EvolutionConfig evolution;  // seed is replaced per run
  int64_t budget = 0;                    // 0 keeps the task default
  std::function<void(const nlohmann::json&)> on_run;
};

// Auto mode, mock backend: revolve and greedy on every (task, seed).
// Returns {"runs": [...], "summary": {task: ...}, "plot": {task: ...}}.
nlohmann::json RunBench(const BenchOptions& options);

// Writes the best reward program, its policy and rollouts, and the metrics
// of a stored run into out_dir. Returns a manifest.
nlohmann::json ExportRun(const std::string& data_dir, const std::string& run_id,
                         const std::string& out_dir);

// Replays a match-history file through rerate_all.
nlohmann::json RateHistory(const std::string& path, double k);

double Median(std::vector<double> values);

}  // namespace revo::orchestrator

#endif  // REVO_ORCHESTRATOR_RUNNER_H_
