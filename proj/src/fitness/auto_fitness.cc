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

#include "revo/fitness/auto_fitness.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "revo/dsl/evaluate.h"

namespace revo::fitness {
namespace {

double ScalarAt(const dsl::State& state, const char* name) {
  auto it = state.find(name);
  if (it == state.end()) throw TraceSchemaError(std::string("missing variable '") + name + "'");
  const double* v = std::get_if<double>(&it->second);
  if (!v) throw TraceSchemaError(std::string("variable '") + name + "' is not a scalar");
  return *v;
}

const std::vector<double>& SeriesAt(const dsl::State& state, const char* name) {
  auto it = state.find(name);
  const std::vector<double>* v = it == state.end() ? nullptr
                                                   : std::get_if<std::vector<double>>(&it->second);
  if (!v) throw TraceSchemaError(std::string("missing series '") + name + "'");
  return *v;
}

void RequireSteps(const envs::RolloutTrace& trace) {
  if (trace.steps.empty()) throw TraceSchemaError("trace has no steps");
}

double Mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double SpeedScore(double v, const DrivingFitnessParams& p) {
  if (p.v_adj_min() <= v && v <= p.v_max) return 1.0;
  double gap = std::min(std::fabs(v - p.v_adj_min()), std::fabs(v - p.v_adj_max()));
  return std::max(0.0, 1.0 - gap / (p.v_adj_max() - p.v_adj_min()));
}

double DistanceScore(double d, const DrivingFitnessParams& p) {
  if (d <= p.d_max) return 1.0;
  return std::max(0.0, 1.0 - (d - p.d_max) / p.d_max);
}

double DrivingStepScore(double v, double d, bool collision, const DrivingFitnessParams& p) {
  if (collision) return p.collision_penalty;
  if (v < p.v_min_limit || v > p.v_max_limit) return 0.0;
  if (d > p.d_fail) return 0.0;
  return (SpeedScore(v, p) + DistanceScore(d, p)) / 2.0;
}

double DrivingFitness(const envs::RolloutTrace& trace, const DrivingFitnessParams& p,
                      Aggregation aggregation) {
  RequireSteps(trace);
  double sum = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& step : trace.steps) {
    double s = DrivingStepScore(ScalarAt(step.state, "speed"), ScalarAt(step.state, "min_pos"),
                                step.events.collision, p);
    sum += s;
    lowest = std::min(lowest, s);
  }
  if (aggregation == Aggregation::kMin) return lowest;
  return sum / static_cast<double>(trace.steps.size());
}

double LocomotionFitness(const std::vector<double>& velocities, int horizon) {
  if (horizon <= 0) throw TraceSchemaError("horizon must be positive");
  if (static_cast<int>(velocities.size()) != horizon) return 0.0;
  double sum = 0.0;
  for (double v : velocities) sum += v;
  return sum / static_cast<double>(horizon);
}

double LocomotionFitness(const envs::RolloutTrace& trace) {
  RequireSteps(trace);
  std::vector<double> v;
  for (const auto& step : trace.steps) {
    if (step.events.unhealthy) return 0.0;
    v.push_back(ScalarAt(step.state, "vel_x"));
  }
  return LocomotionFitness(v, trace.horizon);
}

double ManipulationFitness(int steps, bool success, const ManipulationParams& p) {
  if (!success) return 0.0;
  int clamped = std::clamp(steps, p.t_min, p.t_max);
  return p.a() * static_cast<double>(clamped) + p.b();
}

double ManipulationFitness(const envs::RolloutTrace& trace, const ManipulationParams& p) {
  RequireSteps(trace);
  if (!trace.success_step) return 0.0;
  return ManipulationFitness(*trace.success_step, true, p);
}

double TaskFitness(const envs::RolloutTrace& trace, const TaskFitnessParams& params) {
  if (trace.task == "drive") {
    return DrivingFitness(trace, params.driving, params.driving_aggregation);
  }
  if (trace.task == "strider") return LocomotionFitness(trace);
  if (trace.task == "latch") return ManipulationFitness(trace, params.manipulation);
  throw TraceSchemaError("unknown task '" + trace.task + "'");
}

std::vector<std::string> AutoTags(const envs::RolloutTrace& trace) {
  RequireSteps(trace);
  std::vector<std::string> tags;
  auto tag = [&](const char* aspect, bool positive) {
    tags.push_back(std::string(aspect) + (positive ? ": positive" : ": negative"));
  };
  const auto& steps = trace.steps;
  const double n = static_cast<double>(steps.size());
  if (trace.task == "drive") {
    bool crashed = steps.back().events.collision;
    tag("collision avoidance", !crashed);
    std::vector<double> dev, spread;
    int in_band = 0;
    for (const auto& s : steps) {
      dev.push_back(ScalarAt(s.state, "min_pos"));
      double v = ScalarAt(s.state, "speed");
      in_band += v >= 8.0 && v <= 11.5;
      spread.push_back(0.0);
      const auto& a = SeriesAt(s.state, "action_list");
      if (a.size() >= 2) {
        double m = Mean(a), acc = 0.0;
        for (double x : a) acc += (x - m) * (x - m);
        spread.back() = std::sqrt(acc / static_cast<double>(a.size()));
      }
    }
    double mean_dev = Mean(dev);
    if (mean_dev <= 0.5) tag("lane keeping", true);
    if (mean_dev > 1.0) tag("lane keeping", false);
    tag("consistent speed", in_band >= n / 2.0);
    double mean_spread = Mean(spread);
    if (mean_spread <= 0.25) tag("smooth steering", true);
    if (mean_spread >= 0.5) tag("smooth steering", false);
  } else if (trace.task == "strider") {
    bool upright = static_cast<int>(steps.size()) == trace.horizon && !steps.back().events.unhealthy;
    tag("staying upright", upright);
    std::vector<double> vel, tilt, effort;
    for (const auto& s : steps) {
      vel.push_back(ScalarAt(s.state, "vel_x"));
      tilt.push_back(std::fabs(ScalarAt(s.state, "posture") - 1.5));
      effort.push_back(ScalarAt(s.state, "effort"));
    }
    double mv = Mean(vel);
    if (mv >= 2.0) tag("forward progress", true);
    if (mv < 1.0) tag("forward progress", false);
    double mt = Mean(tilt);
    if (mt <= 0.15) tag("balance", true);
    if (mt >= 0.3) tag("balance", false);
    double me = Mean(effort);
    if (me <= 0.5) tag("energy efficiency", true);
    if (me >= 1.0) tag("energy efficiency", false);
  } else if (trace.task == "latch") {
    bool opened = trace.success_step.has_value();
    tag("door opening", opened);
    bool freed = false;
    double max_handle = 0.0;
    for (const auto& s : steps) {
      freed |= ScalarAt(s.state, "latch_free") > 0.5;
      max_handle = std::max(max_handle, ScalarAt(s.state, "handle_pull"));
    }
    tag("latch rotation", freed);
    tag("handle pull", max_handle >= 2.0 / 3.0);
    if (opened) tag("quick completion", *trace.success_step <= 2 * trace.horizon / 5);
  } else {
    throw TraceSchemaError("unknown task '" + trace.task + "'");
  }
  return tags;
}

}  // namespace revo::fitness
