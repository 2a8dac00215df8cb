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

#include "revo/evolution/scorer.h"

#include "revo/envs/latch_world.h"
#include "revo/fitness/feedback.h"

namespace revo::evolution {
namespace {

fitness::TaskFitnessParams DefaultParams(const std::string& task) {
  fitness::TaskFitnessParams p;
  if (task == "latch") p.manipulation = {envs::LatchMinimalSteps(), envs::LatchWorld::kDefaultHorizon};
  return p;
}

}  // namespace

AutoScorer::AutoScorer(std::string task) : task_(std::move(task)), params_(DefaultParams(task_)) {}

AutoScorer::AutoScorer(std::string task, fitness::TaskFitnessParams params)
    : task_(std::move(task)), params_(params) {}

double AutoScorer::MinFitness() const { return task_ == "drive" ? -1.0 : 0.0; }

void AutoScorer::ScoreOne(Individual& individual, const std::vector<envs::RolloutTrace>& traces) const {
  if (traces.empty()) {
    individual.sigma = MinFitness();
    individual.lambda = "";
    return;
  }
  double sum = 0.0;
  std::vector<std::string> tags;
  for (const auto& t : traces) {
    sum += fitness::TaskFitness(t, params_);
    for (auto& tag : fitness::AutoTags(t)) tags.push_back(std::move(tag));
  }
  individual.sigma = sum / static_cast<double>(traces.size());
  individual.lambda = fitness::ComposeFeedback(tags);
}

}  // namespace revo::evolution
