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

#ifndef REVO_EVOLUTION_SCORER_H_
#define REVO_EVOLUTION_SCORER_H_

#include <string>
#include <vector>

#include "revo/envs/trace.h"
#include "revo/evolution/database.h"
#include "revo/fitness/auto_fitness.h"
#include "revo/trainer/trainer.h"

namespace revo::evolution {

// Receives policies and rollouts as they are produced. The default keeps
// nothing.
class ArtifactSink {
 public:
  virtual ~ArtifactSink() = default;
  // Returns the policy reference to record, or "" when not stored.
  virtual std::string SavePolicy(const std::string&, const trainer::Policy&) { return ""; }
  virtual void SaveTrace(const envs::RolloutTrace&) {}
};

// Turns rollouts into (sigma, lambda).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string mode() const = 0;
  // Lowest score a degenerate individual receives.
  virtual double MinFitness() const = 0;
  // Called inside the per-individual pipeline, possibly concurrently.
  virtual void ScoreOne(Individual& individual, const std::vector<envs::RolloutTrace>& traces) const = 0;
  // Called once per generation after every pipeline finished and before
  // selection; may also revise sigmas already in the database.
  virtual void ScoreGeneration(std::vector<Individual>& fresh, RewardDatabase& db) = 0;
};

// Closed-form task fitness averaged over the rollouts; lambda is composed
// from the automatic tags of every rollout.
class AutoScorer : public Scorer {
 public:
  // Latch completion is scored between the shortest solution and the horizon.
  explicit AutoScorer(std::string task);
  AutoScorer(std::string task, fitness::TaskFitnessParams params);

  std::string mode() const override { return "auto"; }
  double MinFitness() const override;
  void ScoreOne(Individual& individual, const std::vector<envs::RolloutTrace>& traces) const override;
  void ScoreGeneration(std::vector<Individual>&, RewardDatabase&) override {}

 private:
  std::string task_;
  fitness::TaskFitnessParams params_;
};

}  // namespace revo::evolution

#endif  // REVO_EVOLUTION_SCORER_H_
