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

#include "revo/envs/drive_world.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "revo/common/error.h"
#include "revo/common/resources.h"

namespace revo::envs {

using nlohmann::json;

double DriveLayout::CenterY(double x) const {
  return amplitude * std::sin(2.0 * std::numbers::pi * x / wavelength);
}

double DriveLayout::Heading(double x) const {
  double k = 2.0 * std::numbers::pi / wavelength;
  return std::atan(amplitude * k * std::cos(k * x));
}

DriveLayout ParseDriveLayout(const json& j) {
  try {
    DriveLayout l;
    l.name = j.at("name").get<std::string>();
    const json& t = j.at("track");
    l.amplitude = t.at("amplitude").get<double>();
    l.wavelength = t.at("wavelength").get<double>();
    l.length = t.at("length").get<double>();
    l.spacing = t.value("spacing", 0.5);
    l.road_half_width = j.value("road_half_width", 4.0);
    if (l.wavelength <= 0 || l.length <= 0 || l.spacing <= 0 || l.road_half_width <= 0) {
      throw ConfigError("layout " + l.name + ": non-positive track dimension");
    }
    for (double x = 0.0; x <= l.length + 1e-9; x += l.spacing) {
      l.waypoints.emplace_back(x, l.CenterY(x));
    }
    for (const json& o : j.value("obstacles", json::array())) {
      double s = o.at("s").get<double>();
      double offset = o.at("offset").get<double>();
      double h = l.Heading(s);
      // Left normal of the centerline at s.
      l.obstacles.push_back({s - offset * std::sin(h), l.CenterY(s) + offset * std::cos(h),
                             o.value("radius", 1.0)});
    }
    return l;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed drive layout: ") + e.what());
  }
}

DriveLayout LoadDriveLayout(const std::string& name) {
  return ParseDriveLayout(json::parse(EmbeddedResource("data/layouts/drive_" + name + ".json")));
}

json DriveLayoutToJson(const DriveLayout& l) {
  json obstacles = json::array();
  for (const auto& o : l.obstacles) {
    obstacles.push_back({{"x", o.x}, {"y", o.y}, {"radius", o.radius}});
  }
  json waypoints = json::array();
  for (const auto& [x, y] : l.waypoints) waypoints.push_back(json::array({x, y}));
  return json{{"name", l.name},
              {"road_half_width", l.road_half_width},
              {"waypoints", waypoints},
              {"obstacles", obstacles}};
}

const dsl::EnvSchema& DriveSchema() {
  using dsl::VarKind;
  static const dsl::EnvSchema schema(
      "drive",
      {
          {"curr_x", VarKind::kScalar, "m", "car position along the world x axis"},
          {"curr_y", VarKind::kScalar, "m", "car position along the world y axis"},
          {"speed", VarKind::kScalar, "m/s", "current forward speed, 0 to 15"},
          {"collision", VarKind::kFlag, "", "1 if the car hit an obstacle or left the road"},
          {"min_pos", VarKind::kScalar, "m", "distance from the car to the nearest waypoint"},
          {"distance", VarKind::kScalar, "m",
           "clearance to the nearest obstacle straight ahead, capped at 20"},
          {"action_list", VarKind::kSeries, "",
           "last 4 steering commands in [-1, 1], oldest first"},
      });
  return schema;
}

DriveWorld::DriveWorld(DriveLayout layout, int horizon)
    : layout_(std::move(layout)), horizon_(horizon) {
  if (horizon_ <= 0) throw ConfigError("horizon must be positive");
  Reset(0);
}

void DriveWorld::Reset(uint64_t seed) {
  Rng rng(seed);
  x_ = 0.0;
  y_ = layout_.CenterY(0.0) + UniformRange(rng, -0.3, 0.3);
  heading_ = layout_.Heading(0.0) + UniformRange(rng, -0.05, 0.05);
  speed_ = 0.0;
  history_.clear();
  steps_ = 0;
  done_ = false;
  collided_ = false;
}

void DriveWorld::Place(double x, double y, double heading, double speed) {
  x_ = x;
  y_ = y;
  heading_ = heading;
  speed_ = speed;
}

double DriveWorld::Steering(int action) {
  return -1.0 + 2.0 * static_cast<double>(action % kSteerBins) / (kSteerBins - 1);
}

bool DriveWorld::Throttle(int action) { return action >= kSteerBins; }

StepEvents DriveWorld::Step(int action) {
  if (done_) throw EpisodeEnded();
  if (action < 0 || action >= num_actions()) throw Error("action out of range");
  double steer = Steering(action);
  speed_ += (Throttle(action) ? kAccel : -kDecel) * kDt;
  speed_ = std::clamp(speed_, 0.0, kMaxSpeed);
  heading_ += steer * kYawRate * kDt;
  heading_ = std::remainder(heading_, 2.0 * std::numbers::pi);
  x_ += speed_ * std::cos(heading_) * kDt;
  y_ += speed_ * std::sin(heading_) * kDt;
  history_.push_back(steer);
  if (history_.size() > kHistory) history_.erase(history_.begin());
  ++steps_;

  StepEvents events;
  collided_ = Collides();
  events.collision = collided_;
  done_ = collided_ || steps_ >= horizon_ || x_ >= layout_.length || x_ < -layout_.road_half_width;
  return events;
}

bool DriveWorld::Collides() const {
  if (min_pos() > layout_.road_half_width) return true;
  for (const auto& o : layout_.obstacles) {
    if (std::hypot(x_ - o.x, y_ - o.y) <= o.radius + kCarRadius) return true;
  }
  return false;
}

double DriveWorld::min_pos() const {
  const auto& wp = layout_.waypoints;
  long center = std::lround(x_ / layout_.spacing);
  long lo = std::clamp<long>(center - 16, 0, static_cast<long>(wp.size()) - 1);
  long hi = std::clamp<long>(center + 16, 0, static_cast<long>(wp.size()) - 1);
  double best = std::numeric_limits<double>::infinity();
  for (long i = lo; i <= hi; ++i) {
    best = std::min(best, std::hypot(x_ - wp[i].first, y_ - wp[i].second));
  }
  if (!std::isfinite(best)) best = std::hypot(x_ - wp.front().first, y_ - wp.front().second);
  return best;
}

double DriveWorld::front_distance() const {
  double dx = std::cos(heading_), dy = std::sin(heading_);
  double best = kRayRange;
  for (const auto& o : layout_.obstacles) {
    double fx = o.x - x_, fy = o.y - y_;
    double along = fx * dx + fy * dy;
    double perp2 = fx * fx + fy * fy - along * along;
    double r2 = o.radius * o.radius;
    if (fx * fx + fy * fy <= r2) return 0.0;
    if (along <= 0 || perp2 > r2) continue;
    double hit = along - std::sqrt(r2 - perp2);
    best = std::min(best, std::max(0.0, hit));
  }
  return best;
}

void DriveWorld::Observe(dsl::StateVector& out) const {
  out.scalars.assign(7, 0.0);
  out.series.assign(7, {});
  out.scalars[0] = x_;
  out.scalars[1] = y_;
  out.scalars[2] = speed_;
  out.scalars[3] = collided_ ? 1.0 : 0.0;
  out.scalars[4] = min_pos();
  out.scalars[5] = front_distance();
  out.series[6] = history_;
}

size_t DriveWorld::DiscreteState() const {
  auto bin = [](double v, double lo, double hi, int n) {
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
    return static_cast<size_t>(std::clamp(b, 0, n - 1));
  };
  double ymax = layout_.amplitude + layout_.road_half_width;
  size_t bx = bin(x_, 0.0, layout_.length, 20);
  size_t by = bin(y_, -ymax, ymax, 20);
  size_t bv = bin(speed_, 0.0, 16.0, 8);
  size_t bh = bin(heading_, -std::numbers::pi, std::numbers::pi, 12);
  return ((bx * 20 + by) * 8 + bv) * 12 + bh;
}

std::map<std::string, double> DriveWorld::RenderInfo() const {
  return {{"heading", heading_}};
}

std::unique_ptr<Environment> DriveWorld::Clone() const {
  return std::make_unique<DriveWorld>(*this);
}

}  // namespace revo::envs
