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

#ifndef REVO_ENVS_TRACE_H_
#define REVO_ENVS_TRACE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revo/dsl/evaluate.h"
#include "revo/dsl/schema.h"
#include "revo/envs/env.h"

namespace revo::envs {

inline constexpr int kTraceVersion = 1;

struct TraceStep {
  int t = 0;  // 1-based step index
  int action = 0;
  dsl::State state;  // bindings after the transition
  std::optional<dsl::RewardOutput> reward;
  StepEvents events;
  std::map<std::string, double> render;
};

struct RolloutTrace {
  std::string id;
  std::string task;
  std::string layout;
  uint64_t seed = 0;
  int horizon = 0;
  dsl::State initial;
  std::map<std::string, double> initial_render;
  std::vector<TraceStep> steps;
  int steps_survived = 0;
  std::optional<int> success_step;
  // Set when the reward program failed with a non-finite value mid-rollout;
  // rewards after that step are absent.
  bool degenerate = false;
};

nlohmann::json TraceToJson(const RolloutTrace& trace);
// Throws revo::Error on malformed input.
RolloutTrace TraceFromJson(const nlohmann::json& j);

// Checks every snapshot binds exactly the schema variables with the right
// shape. Returns an empty string when valid, else a description.
std::string CheckTraceSchema(const RolloutTrace& trace, const dsl::EnvSchema& schema);

using ActionChooser = std::function<int(const Environment& env)>;

// Runs one episode from Reset(seed) until done(). When `program` is given each
// step also records its RewardOutput; a NonFiniteResult marks the trace
// degenerate instead of propagating.
RolloutTrace RecordRollout(Environment& env, uint64_t seed, const ActionChooser& choose,
                           const dsl::CompiledProgram* program = nullptr);

}  // namespace revo::envs

#endif  // REVO_ENVS_TRACE_H_
