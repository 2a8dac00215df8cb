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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "revo/common/random.h"
#include "revo/envs/drive_world.h"
#include "revo/envs/latch_world.h"
#include "revo/envs/strider_world.h"
#include "revo/envs/trace.h"
#include "revo/dsl/parser.h"
#include "revo/fitness/auto_fitness.h"
#include "revo/fitness/feedback.h"

namespace revo::envs {
namespace {

ActionChooser RandomPolicy(uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const Environment& env) {
    return static_cast<int>(UniformIndex(*rng, static_cast<uint64_t>(env.num_actions())));
  };
}

ActionChooser Constant(int action) {
  return [action](const Environment&) { return action; };
}

TEST_CASE("factory and schemas") {
  for (const char* task : {"drive", "strider", "latch"}) {
    auto env = MakeEnvironment(task);
    CHECK(env->task() == task);
    CHECK(env->schema() == TaskSchema(task));
    dsl::StateVector sv(env->schema().size());
    env->Observe(sv);
    CHECK(sv.scalars.size() == env->schema().size());
    CHECK(env->DiscreteState() < env->num_states());
  }
  std::vector<std::string> names;
  for (const auto& v : DriveSchema().variables()) names.push_back(v.name);
  CHECK(names == std::vector<std::string>{"curr_x", "curr_y", "speed", "collision", "min_pos",
                                          "distance", "action_list"});
  CHECK(MakeEnvironment("drive")->num_actions() == 22);
  CHECK(MakeEnvironment("strider")->num_actions() == 9);
  CHECK(MakeEnvironment("latch")->num_actions() == 7);
  CHECK_THROWS_AS(MakeEnvironment("chess"), ConfigError);
  CHECK_THROWS_AS(MakeEnvironment("drive", {"nowhere", 0}), ConfigError);
  for (const char* layout : {"default", "lane", "dense"}) {
    CHECK(MakeEnvironment("drive", {layout, 0})->layout() == layout);
  }
}

TEST_CASE("random rollouts are reproducible and schema-conformant") {
  for (const char* task : {"drive", "strider", "latch"}) {
    auto env = MakeEnvironment(task);
    RolloutTrace a = RecordRollout(*env, 11, RandomPolicy(5));
    RolloutTrace b = RecordRollout(*env, 11, RandomPolicy(5));
    CHECK(TraceToJson(a) == TraceToJson(b));
    CHECK(CheckTraceSchema(a, env->schema()) == "");
    CHECK(static_cast<int>(a.steps.size()) <= env->horizon());
    CHECK(a.steps_survived == static_cast<int>(a.steps.size()));
    RolloutTrace back = TraceFromJson(nlohmann::json::parse(TraceToJson(a).dump()));
    CHECK(TraceToJson(back) == TraceToJson(a));
    RolloutTrace c = RecordRollout(*env, 12, RandomPolicy(5));
    if (std::string(task) != "latch") CHECK(TraceToJson(c) != TraceToJson(a));
  }
}

TEST_CASE("stepping a finished episode throws") {
  LatchWorld env(3);
  env.Reset(0);
  for (int i = 0; i < 3; ++i) env.Step(LatchWorld::kIdle);
  CHECK(env.done());
  CHECK_THROWS_AS(env.Step(LatchWorld::kIdle), EpisodeEnded);
  CHECK_THROWS_AS(MakeEnvironment("drive")->Step(99), Error);
}

TEST_CASE("drive: steering and throttle decoding") {
  CHECK(DriveWorld::Steering(0) == -1.0);
  CHECK(DriveWorld::Steering(5) == 0.0);
  CHECK(DriveWorld::Steering(10) == 1.0);
  CHECK(DriveWorld::Steering(21) == 1.0);
  CHECK_FALSE(DriveWorld::Throttle(10));
  CHECK(DriveWorld::Throttle(11));
}

TEST_CASE("drive: straight into an obstacle collides") {
  nlohmann::json layout = {{"name", "wall"},
                           {"track", {{"amplitude", 0.0}, {"wavelength", 100.0}, {"length", 100.0}}},
                           {"obstacles", {{{"s", 30.0}, {"offset", 0.0}, {"radius", 1.0}}}}};
  DriveWorld env(ParseDriveLayout(layout), 400);
  RolloutTrace t = RecordRollout(env, 0, Constant(16));  // straight, throttle on
  REQUIRE(!t.steps.empty());
  CHECK(t.steps.back().events.collision);
  CHECK(std::get<double>(t.steps.back().state.at("collision")) == 1.0);
  double x = std::get<double>(t.steps.back().state.at("curr_x"));
  CHECK(x <= 30.0 - 1.5 + 2.0);
  CHECK(x >= 30.0 - 1.5 - 2.0);
  CHECK(fitness::DrivingFitness(t) < 1.0);
}

TEST_CASE("drive: geometry of observations") {
  nlohmann::json layout = {{"name", "flat"},
                           {"track", {{"amplitude", 0.0}, {"wavelength", 100.0}, {"length", 100.0}}},
                           {"obstacles", {{{"s", 20.0}, {"offset", 0.0}, {"radius", 1.0}}}}};
  DriveWorld env(ParseDriveLayout(layout));
  env.Place(10.0, 0.0, 0.0, 5.0);
  CHECK(env.min_pos() == 0.0);
  CHECK(env.front_distance() == doctest::Approx(9.0).epsilon(1e-12));
  env.Place(10.0, 0.6, 0.0, 5.0);
  CHECK(env.min_pos() == doctest::Approx(0.6).epsilon(1e-12));
  // Chord geometry: ray at lateral offset 0.6 hits the unit disc at
  // 10 - sqrt(1 - 0.36) = 9.2.
  CHECK(env.front_distance() == doctest::Approx(9.2).epsilon(1e-12));
  env.Place(10.0, 0.0, std::numbers::pi, 5.0);
  CHECK(env.front_distance() == 20.0);
  env.Place(0.0, 0.0, 0.0, 5.0);
  CHECK(env.front_distance() == 19.0);
  env.Place(10.25, 0.1, 0.0, 0.0);
  CHECK(env.min_pos() == doctest::Approx(std::hypot(0.25, 0.1)).epsilon(1e-12));
}

TEST_CASE("drive: off-road counts as a collision") {
  DriveWorld env(LoadDriveLayout("default"));
  RolloutTrace t = RecordRollout(env, 3, Constant(21));  // full left, throttle on
  CHECK(t.steps.back().events.collision);
  CHECK(std::get<double>(t.steps.back().state.at("min_pos")) > 4.0);
}

TEST_CASE("drive: speed respects throttle dynamics") {
  DriveWorld env(LoadDriveLayout("default"));
  RolloutTrace t = RecordRollout(env, 9, RandomPolicy(2));
  double prev = 0.0;
  for (const auto& s : t.steps) {
    double v = std::get<double>(s.state.at("speed"));
    CHECK(v >= 0.0);
    CHECK(v <= DriveWorld::kMaxSpeed);
    CHECK(v - prev <= DriveWorld::kAccel * DriveWorld::kDt + 1e-12);
    CHECK(prev - v <= DriveWorld::kDecel * DriveWorld::kDt + 1e-12);
    double d = std::get<double>(s.state.at("distance"));
    CHECK(d >= 0.0);
    CHECK(d <= 20.0);
    CHECK(std::get<std::vector<double>>(s.state.at("action_list")).size() <= 4);
    prev = v;
  }
}

TEST_CASE("drive: stationary policy scores zero") {
  DriveWorld env(LoadDriveLayout("default"));
  RolloutTrace t = RecordRollout(env, 1, Constant(5));  // straight, no throttle
  CHECK(t.steps.size() == 200);
  for (const auto& s : t.steps) CHECK(std::get<double>(s.state.at("speed")) == 0.0);
  CHECK(fitness::DrivingFitness(t) == 0.0);
}

TEST_CASE("strider: no posture control falls before the horizon") {
  // Drift is at least kDriftBase - kNoise = 0.0035 per step, so posture passes
  // 2.0 within ceil(0.52 / 0.0035) = 149 < 200 steps whatever the velocity.
  CHECK((StriderWorld::kHealthyHigh - StriderWorld::kStartPosture + 0.02) /
            (StriderWorld::kDriftBase - StriderWorld::kNoise) <
        StriderWorld::kDefaultHorizon);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    StriderWorld env;
    Rng rng(seed);
    ActionChooser choose = [&](const Environment&) {
      return 3 * static_cast<int>(UniformIndex(rng, 3)) + 1;  // posture sign 0
    };
    RolloutTrace t = RecordRollout(env, seed, choose);
    CHECK(t.steps_survived < env.horizon());
    CHECK(t.steps.back().events.unhealthy);
    CHECK(fitness::LocomotionFitness(t) == 0.0);
  }
}

TEST_CASE("strider: a balancing controller survives") {
  StriderWorld env;
  ActionChooser choose = [](const Environment& e) {
    const auto& s = static_cast<const StriderWorld&>(e);
    int accel = s.velocity() < 3.0 ? 2 : 1;
    int posture = s.posture() > 1.5 ? 0 : 1;
    return 3 * accel + posture;
  };
  RolloutTrace t = RecordRollout(env, 4, choose);
  CHECK(t.steps_survived == 200);
  CHECK(fitness::LocomotionFitness(t) > 2.5);
}

// Independent shortest-path oracle: Bellman-Ford relaxation over all cells.
int LatchOracle() {
  const int n = 5 * 4 * 9;
  std::vector<int> dist(n, 1 << 20);
  dist[LatchWorld::Index({})] = 0;
  for (int round = 0; round < n; ++round) {
    for (int l = 0; l <= 4; ++l)
      for (int h = 0; h <= 3; ++h)
        for (int g = 0; g <= 8; ++g) {
          LatchWorld::Cell c{l, h, g};
          int d = dist[LatchWorld::Index(c)];
          if (d >= (1 << 20) || LatchWorld::IsOpen(c)) continue;
          for (int a = 0; a < 7; ++a) {
            int& nd = dist[LatchWorld::Index(LatchWorld::Transition(c, a))];
            nd = std::min(nd, d + 1);
          }
        }
  }
  int best = 1 << 20;
  for (int l = 0; l <= 4; ++l)
    for (int h = 0; h <= 3; ++h)
      for (int g = 6; g <= 8; ++g) best = std::min(best, dist[LatchWorld::Index({l, h, g})]);
  return best;
}

TEST_CASE("latch: minimal solution length") {
  CHECK(LatchMinimalSteps() == 12);
  CHECK(LatchOracle() == 12);
  LatchWorld env(100, 0.0);
  std::vector<int> script = {0, 0, 0, 0, 2, 2, 4, 4, 4, 4, 4, 4};
  size_t i = 0;
  RolloutTrace t = RecordRollout(env, 0, [&](const Environment&) { return script[i++]; });
  CHECK(t.success_step == 12);
  CHECK(t.steps_survived == 12);
  CHECK(fitness::ManipulationFitness(t, {12, 100}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("latch: mechanics") {
  using C = LatchWorld::Cell;
  CHECK(LatchWorld::Transition(C{1, 0, 0}, LatchWorld::kHandleUp) == C{0, 0, 0});
  CHECK(LatchWorld::Transition(C{2, 0, 0}, LatchWorld::kHandleUp) == C{2, 1, 0});
  CHECK(LatchWorld::Transition(C{4, 1, 0}, LatchWorld::kDoorOpen) == C{4, 1, 0});
  CHECK(LatchWorld::Transition(C{4, 2, 0}, LatchWorld::kDoorOpen) == C{4, 2, 1});
  CHECK(LatchWorld::Transition(C{0, 0, 1}, LatchWorld::kDoorOpen) == C{0, 0, 2});
  CHECK(LatchWorld::Transition(C{3, 0, 0}, LatchWorld::kIdle) == C{2, 0, 0});
  CHECK(LatchWorld::Transition(C{3, 1, 0}, LatchWorld::kIdle) == C{3, 1, 0});
}

TEST_CASE("latch: success is terminal and monotone") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    LatchWorld env;
    RolloutTrace t = RecordRollout(env, seed, RandomPolicy(seed));
    bool opened = false;
    for (const auto& s : t.steps) {
      if (opened) FAIL("step after success");
      opened = s.events.success;
    }
    CHECK(opened == t.success_step.has_value());
  }
}

TEST_CASE("rollout with a program records rewards") {
  auto env = MakeEnvironment("latch");
  dsl::RewardProgram p = dsl::Parse("component open = door_open; component cost = -0.01 * effort");
  dsl::CompiledProgram compiled(p, env->schema());
  RolloutTrace t = RecordRollout(*env, 1, RandomPolicy(1), &compiled);
  for (const auto& s : t.steps) {
    REQUIRE(s.reward);
    CHECK(s.reward->components.size() == 2);
    CHECK(s.reward->total == dsl::Evaluate(p, s.state).total);
  }
  dsl::RewardProgram bad = dsl::Parse("component boom = exp(1000 * (1 + effort))");
  dsl::CompiledProgram compiled_bad(bad, env->schema());
  RolloutTrace d = RecordRollout(*env, 1, RandomPolicy(1), &compiled_bad);
  CHECK(d.degenerate);
  CHECK_FALSE(d.steps.front().reward);
}

TEST_CASE("auto tags use the task vocabulary") {
  for (const char* task : {"drive", "strider", "latch"}) {
    auto env = MakeEnvironment(task);
    auto vocab = fitness::LoadTagVocabulary(task);
    for (uint64_t seed = 0; seed < 5; ++seed) {
      RolloutTrace t = RecordRollout(*env, seed, RandomPolicy(seed));
      for (const auto& tag : fitness::AutoTags(t)) {
        auto parsed = fitness::ParseTag(tag);
        REQUIRE(parsed);
        CHECK(vocab.Contains(parsed->aspect));
      }
    }
  }
}

}  // namespace
}  // namespace revo::envs
