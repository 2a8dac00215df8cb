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

#ifndef REVO_EVOLUTION_EVOLUTION_H_
#define REVO_EVOLUTION_EVOLUTION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revo/designer/designer.h"
#include "revo/envs/env.h"
#include "revo/evolution/database.h"
#include "revo/evolution/scorer.h"
#include "revo/trainer/trainer.h"

namespace revo::evolution {

inline constexpr int kCheckpointVersion = 1;

struct RunSpec {
  std::string task = "drive";
  envs::EnvOptions env;
  std::string search = "revolve";  // revolve | greedy
  EvolutionConfig evolution;
  trainer::TrainerConfig trainer;  // budget 0 takes the task default
  bool include_statistics = true;  // component statistics in operator prompts
  int design_retries = 3;
  // Fresh parent draws after a design call is exhausted, per slot.
  int max_resamples = 3;
};

nlohmann::json RunSpecToJson(const RunSpec& spec);
// Throws ConfigError.
RunSpec RunSpecFromJson(const nlohmann::json& j);
void CheckSpec(const RunSpec& spec);

struct Collaborators {
  const designer::Backend* backend = nullptr;
  const trainer::Trainer* trainer = nullptr;
  Scorer* scorer = nullptr;
  ArtifactSink* sink = nullptr;  // optional
};

struct GenerationMetrics {
  int generation = 0;
  double best_sigma = 0.0;
  std::string best_id;
  std::vector<std::optional<double>> island_means;
  std::map<std::string, int> operators;  // init, mutate, crossover, crossover_fallback
  int candidates = 0;
  int inserted = 0;
  int failed = 0;
  int degenerate = 0;
  // Running totals up to and including this generation.
  int64_t design_calls = 0;
  int64_t training_jobs = 0;
  int64_t training_steps = 0;
};

nlohmann::json MetricsToJson(const GenerationMetrics& m);
GenerationMetrics MetricsFromJson(const nlohmann::json& j);

struct EvolutionResult {
  std::string search;
  std::string task;
  Individual best;
  std::vector<double> best_trace;  // best sigma after each generation
  std::vector<GenerationMetrics> metrics;
  int64_t design_calls = 0;
  int64_t training_jobs = 0;
  int64_t training_steps = 0;
  bool terminated_early = false;
  RewardDatabase database;
};

nlohmann::json ResultToJson(const EvolutionResult& result);

// Thrown by Run when the interrupt hook asks to stop; the last checkpoint
// handed to on_checkpoint resumes the run.
class Interrupted : public Error {
 public:
  Interrupted() : Error("run interrupted") {}
};

struct RunHooks {
  // Polled after every finished pipeline.
  std::function<bool()> interrupt;
  // Receives the full resumable state after every finished pipeline and
  // every generation.
  std::function<void(const nlohmann::json&)> on_checkpoint;
  std::function<void(const GenerationMetrics&)> on_generation;
};

// The island-model search (and the greedy baseline). Random streams are
// derived from (seed, generation, slot), so a run is a pure function of its
// spec and collaborators, and a checkpoint needs no generator state.
class Evolution {
 public:
  Evolution(RunSpec spec, Collaborators collaborators);
  // Restores from Checkpoint() output. Throws CheckpointError.
  Evolution(const nlohmann::json& checkpoint, Collaborators collaborators);
  ~Evolution();

  // Runs to completion from the current state. Throws Interrupted,
  // designer::DesignerExhausted when every slot of a generation failed, and
  // propagates designer::TransportError.
  EvolutionResult Run(const RunHooks& hooks = {});

  nlohmann::json Checkpoint() const;
  const RunSpec& spec() const { return spec_; }
  const RewardDatabase& database() const { return db_; }
  bool finished() const { return finished_; }

  // Policy evaluation seeds shared by every individual of a run.
  std::vector<uint64_t> EvalSeeds() const;

 private:
  struct SlotOutcome {
    std::optional<Individual> individual;
    int design_calls = 0;
    int training_jobs = 0;
    int64_t training_steps = 0;
    std::string op_count;  // key into GenerationMetrics::operators
  };

  SlotOutcome RunSlot(int generation, int slot) const;
  void FinishGeneration(int generation, const RunHooks& hooks);
  EvolutionResult Result() const;
  void Init();

  RunSpec spec_;
  Collaborators c_;
  std::unique_ptr<envs::Environment> env_;
  RewardDatabase db_;
  std::map<int, SlotOutcome> pending_;
  std::vector<GenerationMetrics> metrics_;
  std::vector<double> best_trace_;
  int64_t design_calls_ = 0;
  int64_t training_jobs_ = 0;
  int64_t training_steps_ = 0;
  bool finished_ = false;
  bool terminated_early_ = false;
  std::optional<Individual> greedy_best_;  // greedy search only
};

}  // namespace revo::evolution

#endif  // REVO_EVOLUTION_EVOLUTION_H_
