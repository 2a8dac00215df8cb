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

#include "revo/envs/latch_world.h"

#include <deque>
#include <vector>

namespace revo::envs {

const dsl::EnvSchema& LatchSchema() {
  using dsl::VarKind;
  static const dsl::EnvSchema schema(
      "latch",
      {
          {"latch_angle", VarKind::kScalar, "rad", "latch rotation, 0 to 1.6; free at 1.6"},
          {"handle_pull", VarKind::kScalar, "", "handle travel, 0 to 1"},
          {"hinge_angle", VarKind::kScalar, "rad", "door opening angle, 0 to 2"},
          {"latch_free", VarKind::kFlag, "", "1 when the latch is fully rotated"},
          {"door_open", VarKind::kFlag, "", "1 once the hinge passes 1.35 rad"},
          {"effort", VarKind::kScalar, "", "1 if the step used an actuator, else 0"},
      });
  return schema;
}

LatchWorld::Cell LatchWorld::Transition(Cell c, int action) {
  bool touched_latch = false;
  switch (action) {
    case kLatchUp:
      c.latch = std::min(c.latch + 1, kLatchMax);
      touched_latch = true;
      break;
    case kLatchDown:
      c.latch = std::max(c.latch - 1, 0);
      touched_latch = true;
      break;
    case kHandleUp:
      if (c.latch >= 2) c.handle = std::min(c.handle + 1, kHandleMax);
      break;
    case kHandleDown:
      c.handle = std::max(c.handle - 1, 0);
      break;
    case kDoorOpen:
      if ((c.latch == kLatchMax && c.handle >= 2) || c.hinge >= 1) {
        c.hinge = std::min(c.hinge + 1, kHingeMax);
      }
      break;
    case kDoorClose:
      c.hinge = std::max(c.hinge - 1, 0);
      break;
    default:
      break;
  }
  if (!touched_latch && c.handle == 0 && c.latch > 0) --c.latch;
  return c;
}

size_t LatchWorld::Index(const Cell& c) {
  return static_cast<size_t>((c.latch * (kHandleMax + 1) + c.handle) * (kHingeMax + 1) + c.hinge);
}

LatchWorld::LatchWorld(int horizon, double slip) : horizon_(horizon), slip_(slip) {
  if (horizon_ <= 0) throw ConfigError("horizon must be positive");
  Reset(0);
}

void LatchWorld::Reset(uint64_t seed) {
  rng_.seed(seed);
  cell_ = Cell{};
  acted_ = false;
  steps_ = 0;
  done_ = false;
}

StepEvents LatchWorld::Step(int action) {
  if (done_) throw EpisodeEnded();
  if (action < 0 || action >= num_actions()) throw Error("action out of range");
  acted_ = action != kIdle;
  Cell next = Transition(cell_, action);
  // A slip cancels the commanded move but not the latch spring.
  if (acted_ && Bernoulli(rng_, slip_)) next = Transition(cell_, kIdle);
  cell_ = next;
  ++steps_;
  StepEvents events;
  events.success = IsOpen(cell_);
  done_ = events.success || steps_ >= horizon_;
  return events;
}

void LatchWorld::Observe(dsl::StateVector& out) const {
  out.scalars.assign(6, 0.0);
  out.series.assign(6, {});
  out.scalars[0] = cell_.latch * kLatchRad;
  out.scalars[1] = static_cast<double>(cell_.handle) / kHandleMax;
  out.scalars[2] = cell_.hinge * kHingeRad;
  out.scalars[3] = cell_.latch == kLatchMax ? 1.0 : 0.0;
  out.scalars[4] = IsOpen(cell_) ? 1.0 : 0.0;
  out.scalars[5] = acted_ ? 1.0 : 0.0;
}

std::map<std::string, double> LatchWorld::RenderInfo() const {
  return {{"latch", static_cast<double>(cell_.latch)},
          {"handle", static_cast<double>(cell_.handle)},
          {"hinge", static_cast<double>(cell_.hinge)}};
}

std::unique_ptr<Environment> LatchWorld::Clone() const {
  return std::make_unique<LatchWorld>(*this);
}

int LatchMinimalSteps() {
  const size_t n = (LatchWorld::kLatchMax + 1) * (LatchWorld::kHandleMax + 1) *
                   (LatchWorld::kHingeMax + 1);
  std::vector<int> dist(n, -1);
  std::deque<LatchWorld::Cell> queue;
  LatchWorld::Cell start;
  dist[LatchWorld::Index(start)] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    LatchWorld::Cell c = queue.front();
    queue.pop_front();
    if (LatchWorld::IsOpen(c)) return dist[LatchWorld::Index(c)];
    for (int a = 0; a < 7; ++a) {
      LatchWorld::Cell next = LatchWorld::Transition(c, a);
      size_t i = LatchWorld::Index(next);
      if (dist[i] >= 0) continue;
      dist[i] = dist[LatchWorld::Index(c)] + 1;
      queue.push_back(next);
    }
  }
  return -1;
}

}  // namespace revo::envs
