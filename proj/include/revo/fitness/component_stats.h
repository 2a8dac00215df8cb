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

#ifndef REVO_FITNESS_COMPONENT_STATS_H_
#define REVO_FITNESS_COMPONENT_STATS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace revo::fitness {

struct Accumulator {
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  int64_t count = 0;

  void Add(double v);
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

// Reward component values seen during one checkpoint window of training.
struct CheckpointRecord {
  int64_t step = 0;  // training step at which the window closed
  std::map<std::string, Accumulator> components;
  Accumulator total;
};

struct TrainingLog {
  std::vector<CheckpointRecord> checkpoints;
  std::vector<int> episode_lengths;
  int64_t steps = 0;
  int64_t evaluations = 0;
  int64_t degenerate = 0;
};

nlohmann::json TrainingLogToJson(const TrainingLog& log);
TrainingLog TrainingLogFromJson(const nlohmann::json& j);

struct ComponentStat {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;

  friend bool operator==(const ComponentStat&, const ComponentStat&) = default;
};

using ComponentStatistics = std::map<std::string, std::vector<ComponentStat>>;

// Per-component (min, mean, max) at every checkpoint, in checkpoint order.
ComponentStatistics ComputeComponentStatistics(const TrainingLog& log);

nlohmann::json StatisticsToJson(const ComponentStatistics& stats);
ComponentStatistics StatisticsFromJson(const nlohmann::json& j);

// Prompt text: one line per component listing min/mean/max per checkpoint.
std::string FormatStatistics(const ComponentStatistics& stats,
                             const std::vector<std::string>& order = {});

}  // namespace revo::fitness

#endif  // REVO_FITNESS_COMPONENT_STATS_H_
