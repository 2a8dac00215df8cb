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

#ifndef REVO_ENVS_LATCH_WORLD_H_
#define REVO_ENVS_LATCH_WORLD_H_

#include "revo/common/random.h"
#include "revo/envs/env.h"

namespace revo::envs {

const dsl::EnvSchema& LatchSchema();

// Discrete door with a rotating latch, a pull handle and a hinge.
//   - the handle moves only while the latch is at least half rotated;
//   - the door swings open only once the latch is fully rotated and the
//     handle pulled at least twice, or once it is already ajar;
//   - an unattended latch springs back one notch while the handle is at rest;
//   - each effective move slips (no effect) with probability kSlip.
// 7 actions: latch +/-, handle +/-, door +/-, idle.
class LatchWorld : public Environment {
 public:
  static constexpr int kLatchMax = 4;
  static constexpr int kHandleMax = 3;
  static constexpr int kHingeMax = 8;
  static constexpr int kHingeOpen = 6;
  static constexpr double kLatchRad = 0.4;   // per notch
  static constexpr double kHingeRad = 0.25;  // per notch; open at 1.5 rad
  static constexpr double kSlip = 0.1;
  static constexpr int kDefaultHorizon = 100;

  enum Action { kLatchUp, kLatchDown, kHandleUp, kHandleDown, kDoorOpen, kDoorClose, kIdle };

  struct Cell {
    int latch = 0;
    int handle = 0;
    int hinge = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  // Deterministic transition with no slip.
  static Cell Transition(Cell cell, int action);
  static bool IsOpen(const Cell& cell) { return cell.hinge >= kHingeOpen; }
  static size_t Index(const Cell& cell);

  explicit LatchWorld(int horizon = kDefaultHorizon, double slip = kSlip);

  std::string task() const override { return "latch"; }
  const dsl::EnvSchema& schema() const override { return LatchSchema(); }
  int num_actions() const override { return 7; }
  int horizon() const override { return horizon_; }

  void Reset(uint64_t seed) override;
  StepEvents Step(int action) override;
  bool done() const override { return done_; }
  int steps() const override { return steps_; }
  void Observe(dsl::StateVector& out) const override;
  size_t DiscreteState() const override { return Index(cell_); }
  size_t num_states() const override {
    return (kLatchMax + 1) * (kHandleMax + 1) * (kHingeMax + 1);
  }
  std::map<std::string, double> RenderInfo() const override;
  std::unique_ptr<Environment> Clone() const override;

  const Cell& cell() const { return cell_; }

 private:
  int horizon_;
  double slip_;
  Rng rng_;
  Cell cell_;
  bool acted_ = false;
  int steps_ = 0;
  bool done_ = false;
};

// Fewest actions that open the door from the reset state without slips,
// found by breadth-first search over all cells.
int LatchMinimalSteps();

}  // namespace revo::envs

#endif  // REVO_ENVS_LATCH_WORLD_H_
