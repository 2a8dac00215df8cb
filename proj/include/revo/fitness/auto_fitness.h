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

#ifndef REVO_FITNESS_AUTO_FITNESS_H_
#define REVO_FITNESS_AUTO_FITNESS_H_

#include <string>
#include <vector>

#include "revo/common/error.h"
#include "revo/envs/trace.h"

namespace revo::fitness {

class TraceSchemaError : public Error {
 public:
  explicit TraceSchemaError(const std::string& what) : Error("trace schema: " + what) {}
};

struct DrivingFitnessParams {
  double collision_penalty = -1.0;
  double v_min = 9.0;
  double v_max = 10.5;
  double v_min_limit = 2.5;
  double v_max_limit = 15.0;
  double v_th = 1.0;
  double d_max = 0.5;
  double d_fail = 4.0;

  double v_adj_min() const { return v_min - v_th; }
  double v_adj_max() const { return v_max + v_th; }
};

enum class Aggregation { kMean, kMin };

double SpeedScore(double v, const DrivingFitnessParams& p = {});
double DistanceScore(double d, const DrivingFitnessParams& p = {});
double DrivingStepScore(double v, double d, bool collision, const DrivingFitnessParams& p = {});

// Episode score from per-step speed, min_pos and collision flags.
double DrivingFitness(const envs::RolloutTrace& trace, const DrivingFitnessParams& p = {},
                      Aggregation aggregation = Aggregation::kMean);

// Sum of forward velocities over the horizon if the episode survived the full
// horizon, else 0.
double LocomotionFitness(const std::vector<double>& velocities, int horizon);
double LocomotionFitness(const envs::RolloutTrace& trace);

// Linear in the completion step through (t_min, 1) and (t_max, 0.5).
struct ManipulationParams {
  int t_min = 50;
  int t_max = 400;

  double a() const { return -0.5 / static_cast<double>(t_max - t_min); }
  double b() const { return 1.0 - a() * static_cast<double>(t_min); }
};

// Completion step is clamped to [t_min, t_max]; failure scores 0.
double ManipulationFitness(int steps, bool success, const ManipulationParams& p = {});
double ManipulationFitness(const envs::RolloutTrace& trace, const ManipulationParams& p);

struct TaskFitnessParams {
  DrivingFitnessParams driving;
  Aggregation driving_aggregation = Aggregation::kMean;
  ManipulationParams manipulation;
};

// Dispatches on trace.task.
double TaskFitness(const envs::RolloutTrace& trace, const TaskFitnessParams& params);

// Checkbox tags a scripted observer would tick for this rollout, drawn from
// the task's tag vocabulary. Used for automatic feedback text and by bot
// evaluators.
std::vector<std::string> AutoTags(const envs::RolloutTrace& trace);

}  // namespace revo::fitness

#endif  // REVO_FITNESS_AUTO_FITNESS_H_
