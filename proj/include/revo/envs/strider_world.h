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

#ifndef REVO_ENVS_STRIDER_WORLD_H_
#define REVO_ENVS_STRIDER_WORLD_H_

#include <vector>

#include "revo/common/random.h"
#include "revo/envs/env.h"

namespace revo::envs {

const dsl::EnvSchema& StriderSchema();

// One-dimensional walker. Velocity is pushed by accelerations, posture drifts
// upward faster the faster the walker moves and must be corrected. 9 actions:
// acceleration {-, 0, +} times posture correction {-, 0, +}.
class StriderWorld : public Environment {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kMaxVelocity = 4.0;
  static constexpr double kAccelStep = 0.25;       // m/s per step
  static constexpr double kPostureStep = 0.02;     // per step
  static constexpr double kDriftBase = 0.005;
  static constexpr double kDriftPerVelocity = 0.004;
  static constexpr double kNoise = 0.0015;         // uniform half-width
  static constexpr double kHealthyLow = 1.0;
  static constexpr double kHealthyHigh = 2.0;
  static constexpr double kStartPosture = 1.5;
  static constexpr int kHistory = 4;
  static constexpr int kDefaultHorizon = 200;

  explicit StriderWorld(int horizon = kDefaultHorizon);

  std::string task() const override { return "strider"; }
  const dsl::EnvSchema& schema() const override { return StriderSchema(); }
  int num_actions() const override { return 9; }
  int horizon() const override { return horizon_; }

  void Reset(uint64_t seed) override;
  StepEvents Step(int action) override;
  bool done() const override { return done_; }
  int steps() const override { return steps_; }
  void Observe(dsl::StateVector& out) const override;
  size_t DiscreteState() const override;
  size_t num_states() const override { return 8 * 10; }
  std::map<std::string, double> RenderInfo() const override;
  std::unique_ptr<Environment> Clone() const override;

  // Action decoding: acceleration sign and posture correction sign in {-1,0,1}.
  static int AccelSign(int action) { return action / 3 - 1; }
  static int PostureSign(int action) { return action % 3 - 1; }

  double position() const { return x_; }
  double velocity() const { return v_; }
  double posture() const { return p_; }

 private:
  int horizon_;
  Rng rng_;
  double x_ = 0, v_ = 0, p_ = kStartPosture, effort_ = 0;
  std::vector<double> history_;
  int steps_ = 0;
  bool done_ = false;
  bool unhealthy_ = false;
};

}  // namespace revo::envs

#endif  // REVO_ENVS_STRIDER_WORLD_H_
