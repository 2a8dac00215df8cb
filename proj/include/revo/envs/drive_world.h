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

#ifndef REVO_ENVS_DRIVE_WORLD_H_
#define REVO_ENVS_DRIVE_WORLD_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "revo/common/random.h"
#include "revo/envs/env.h"

namespace revo::envs {

struct Obstacle {
  double x = 0.0;
  double y = 0.0;
  double radius = 1.0;
};

// Track centerline y = amplitude * sin(2 pi x / wavelength) for x in
// [0, length], sampled every `spacing` metres, plus static obstacle discs.
struct DriveLayout {
  std::string name;
  double amplitude = 3.0;
  double wavelength = 150.0;
  double length = 320.0;
  double spacing = 0.5;
  double road_half_width = 4.0;
  std::vector<Obstacle> obstacles;
  std::vector<std::pair<double, double>> waypoints;

  double CenterY(double x) const;
  double Heading(double x) const;
};

// Parses a layout file; obstacles are given as {"s", "offset", "radius"} with
// `s` the track x coordinate and `offset` the signed lateral distance.
DriveLayout ParseDriveLayout(const nlohmann::json& j);
// Embedded data/layouts/drive_<name>.json; throws ConfigError if unknown.
DriveLayout LoadDriveLayout(const std::string& name);
nlohmann::json DriveLayoutToJson(const DriveLayout& layout);

const dsl::EnvSchema& DriveSchema();

// Point car on an S-shaped track. 22 actions: 11 steering values in [-1, 1]
// times throttle {off, on}.
class DriveWorld : public Environment {
 public:
  static constexpr int kSteerBins = 11;
  static constexpr double kDt = 0.1;
  static constexpr double kYawRate = 0.5;   // rad/s at full steering
  static constexpr double kAccel = 2.5;     // m/s^2, throttle on
  static constexpr double kDecel = 1.5;     // m/s^2, throttle off
  static constexpr double kMaxSpeed = 15.0;
  static constexpr double kCarRadius = 0.5;
  static constexpr double kRayRange = 20.0;
  static constexpr int kHistory = 4;
  static constexpr int kDefaultHorizon = 200;

  explicit DriveWorld(DriveLayout layout, int horizon = kDefaultHorizon);

  std::string task() const override { return "drive"; }
  std::string layout() const override { return layout_.name; }
  const dsl::EnvSchema& schema() const override { return DriveSchema(); }
  int num_actions() const override { return 2 * kSteerBins; }
  int horizon() const override { return horizon_; }

  void Reset(uint64_t seed) override;
  StepEvents Step(int action) override;
  bool done() const override { return done_; }
  int steps() const override { return steps_; }
  void Observe(dsl::StateVector& out) const override;
  size_t DiscreteState() const override;
  size_t num_states() const override { return 20 * 20 * 8 * 12; }
  std::map<std::string, double> RenderInfo() const override;
  std::unique_ptr<Environment> Clone() const override;

  static double Steering(int action);
  static bool Throttle(int action);

  // Direct state access for tests.
  void Place(double x, double y, double heading, double speed);
  double x() const { return x_; }
  double y() const { return y_; }
  double heading() const { return heading_; }
  double speed() const { return speed_; }
  double min_pos() const;
  double front_distance() const;
  const DriveLayout& track() const { return layout_; }

 private:
  bool Collides() const;

  DriveLayout layout_;
  int horizon_;
  double x_ = 0, y_ = 0, heading_ = 0, speed_ = 0;
  std::vector<double> history_;
  int steps_ = 0;
  bool done_ = false;
  bool collided_ = false;
};

}  // namespace revo::envs

#endif  // REVO_ENVS_DRIVE_WORLD_H_
