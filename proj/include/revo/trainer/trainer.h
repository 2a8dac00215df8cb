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

#ifndef REVO_TRAINER_TRAINER_H_
#define REVO_TRAINER_TRAINER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "revo/common/error.h"
#include "revo/dsl/ast.h"
#include "revo/envs/env.h"
#include "revo/envs/trace.h"
#include "revo/fitness/component_stats.h"

namespace revo::trainer {

struct TrainerConfig {
  // "tabular-q" or "discretized-q". Both run Q-learning over the
  // environment's DiscreteState(); the names only record which grid applies.
  std::string algorithm = "tabular-q";
  int64_t budget = 0;  // environment steps; 0 picks the task default
  double learning_rate = 0.2;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  // Fraction of the budget over which epsilon falls linearly to epsilon_end.
  double epsilon_decay = 0.5;
  int eval_episodes = 5;
  int64_t checkpoint_every = 0;  // 0 = budget / 10
  double shadow_fraction = 0.01;
  int workers = 1;
  uint64_t seed = 0;
};

// Task defaults: drive 200k steps, strider 100k, latch 50k.
int64_t DefaultBudget(std::string_view task);
TrainerConfig DefaultTrainerConfig(std::string_view task);

// Fills budget and checkpoint cadence, then checks invariants. Throws
// ConfigError.
TrainerConfig Resolve(const TrainerConfig& config, std::string_view task);

nlohmann::json TrainerConfigToJson(const TrainerConfig& config);
// Missing fields keep their defaults. Throws ConfigError.
TrainerConfig TrainerConfigFromJson(const nlohmann::json& j);

// Linear schedule; exactly epsilon_end from the end of the decay window on.
double Epsilon(const TrainerConfig& config, int64_t step);

class DegenerateReward : public Error {
 public:
  DegenerateReward(int64_t degenerate, int64_t evaluations);
  double fraction() const { return fraction_; }
  // Environment steps consumed before training stopped.
  int64_t steps() const { return steps_; }

 private:
  double fraction_;
  int64_t steps_;
};

struct PolicyMetadata {
  std::string program_id;
  std::string env_id;
  uint64_t seed = 0;
};

// Learner-independent view of a trained policy.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int Act(const envs::Environment& env) const = 0;
  virtual const PolicyMetadata& metadata() const = 0;
  virtual std::string Serialize() const = 0;
};

// Value table over DiscreteState() x action, row-major.
class TabularPolicy : public Policy {
 public:
  TabularPolicy(size_t num_states, int num_actions, PolicyMetadata metadata);

  int Act(const envs::Environment& env) const override;
  const PolicyMetadata& metadata() const override { return metadata_; }
  // "REVOQTB1", JSON header line, then little-endian doubles.
  std::string Serialize() const override;
  static std::unique_ptr<TabularPolicy> Deserialize(std::string_view bytes);

  // Argmax over actions, ties to the lowest index.
  int Greedy(size_t state) const;
  double MaxValue(size_t state) const;
  double& Q(size_t state, int action) { return q_[state * num_actions_ + action]; }
  double Q(size_t state, int action) const { return q_[state * num_actions_ + action]; }

  size_t num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& values() const { return q_; }

 private:
  size_t num_states_;
  int num_actions_;
  PolicyMetadata metadata_;
  std::vector<double> q_;
};

// Throws CheckpointError on unknown formats.
std::unique_ptr<Policy> LoadPolicy(std::string_view bytes);

struct TrainResult {
  std::shared_ptr<const Policy> policy;
  fitness::TrainingLog log;
};

class Trainer {
 public:
  virtual ~Trainer() = default;
  // `env` is a prototype; implementations train on a Clone().
  virtual TrainResult Train(const dsl::RewardProgram& program, const envs::Environment& env,
                            const TrainerConfig& config,
                            const std::string& program_id = "") const = 0;
};

class QLearningTrainer : public Trainer {
 public:
  // Runs exactly config.budget environment steps. Throws DegenerateReward
  // when at a checkpoint more than half of the reward evaluations so far were
  // degenerate, ValidationError when the program does not fit the schema.
  TrainResult Train(const dsl::RewardProgram& program, const envs::Environment& env,
                    const TrainerConfig& config,
                    const std::string& program_id = "") const override;
};

// One greedy rollout per seed, recording rewards when `program` is given.
std::vector<envs::RolloutTrace> Evaluate(const Policy& policy, const envs::Environment& env,
                                         const std::vector<uint64_t>& seeds,
                                         const dsl::RewardProgram* program = nullptr);

// Uniform-random rollouts, the no-learning baseline.
std::vector<envs::RolloutTrace> EvaluateRandom(const envs::Environment& env,
                                               const std::vector<uint64_t>& seeds,
                                               uint64_t action_seed);

}  // namespace revo::trainer

#endif  // REVO_TRAINER_TRAINER_H_
