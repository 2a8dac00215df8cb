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

#include "revo/envs/strider_world.h"

#include <algorithm>
#include <cmath>

namespace revo::envs {

const dsl::EnvSchema& StriderSchema() {
  using dsl::VarKind;
  static const dsl::EnvSchema schema(
      "strider",
      {
          {"pos_x", VarKind::kScalar, "m", "distance walked forward"},
          {"vel_x", VarKind::kScalar, "m/s", "forward velocity, 0 to 4"},
          {"posture", VarKind::kScalar, "m",
           "torso height; the walker falls outside [1.0, 2.0]"},
          {"healthy", VarKind::kFlag, "", "1 while posture is inside [1.0, 2.0]"},
          {"effort", VarKind::kScalar, "", "actuation used this step, 0 to 2"},
          {"vel_history", VarKind::kSeries, "m/s", "last 4 forward velocities, oldest first"},
      });
  return schema;
}

StriderWorld::StriderWorld(int horizon) : horizon_(horizon) {
  if (horizon_ <= 0) throw ConfigError("horizon must be positive");
  Reset(0);
}

void StriderWorld::Reset(uint64_t seed) {
  rng_.seed(seed);
  x_ = 0.0;
  v_ = 0.0;
  p_ = kStartPosture + UniformRange(rng_, -0.02, 0.02);
  effort_ = 0.0;
  history_.clear();
  steps_ = 0;
  done_ = false;
  unhealthy_ = false;
}

StepEvents StriderWorld::Step(int action) {
  if (done_) throw EpisodeEnded();
  if (action < 0 || action >= num_actions()) throw Error("action out of range");
  int a = AccelSign(action), c = PostureSign(action);
  v_ = std::clamp(v_ + a * kAccelStep, 0.0, kMaxVelocity);
  x_ += v_ * kDt;
  double drift = kDriftBase + kDriftPerVelocity * v_;
  p_ += drift + UniformRange(rng_, -kNoise, kNoise) + c * kPostureStep;
  effort_ = std::abs(a) + std::abs(c);
  history_.push_back(v_);
  if (history_.size() > kHistory) history_.erase(history_.begin());
  ++steps_;
  unhealthy_ = p_ < kHealthyLow || p_ > kHealthyHigh;
  done_ = unhealthy_ || steps_ >= horizon_;
  StepEvents events;
  events.unhealthy = unhealthy_;
  return events;
}

void StriderWorld::Observe(dsl::StateVector& out) const {
  out.scalars.assign(6, 0.0);
  out.series.assign(6, {});
  out.scalars[0] = x_;
  out.scalars[1] = v_;
  out.scalars[2] = p_;
  out.scalars[3] = unhealthy_ ? 0.0 : 1.0;
  out.scalars[4] = effort_;
  out.series[5] = history_;
}

size_t StriderWorld::DiscreteState() const {
  int bv = std::clamp(static_cast<int>(std::floor(v_ / 0.5)), 0, 7);
  int bp = std::clamp(static_cast<int>(std::floor((p_ - kHealthyLow) / 0.1)), 0, 9);
  return static_cast<size_t>(bv * 10 + bp);
}

std::map<std::string, double> StriderWorld::RenderInfo() const {
  return {{"posture", p_}};
}

std::unique_ptr<Environment> StriderWorld::Clone() const {
  return std::make_unique<StriderWorld>(*this);
}

}  // namespace revo::envs
