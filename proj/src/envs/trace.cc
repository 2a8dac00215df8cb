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

#include "revo/envs/trace.h"

#include "revo/common/error.h"

namespace revo::envs {

using nlohmann::json;

namespace {

json StateToJson(const dsl::State& state) {
  json out = json::object();
  for (const auto& [name, value] : state) {
    if (const double* d = std::get_if<double>(&value)) {
      out[name] = *d;
    } else {
      out[name] = std::get<std::vector<double>>(value);
    }
  }
  return out;
}

dsl::State StateFromJson(const json& j) {
  dsl::State out;
  for (const auto& [name, value] : j.items()) {
    if (value.is_array()) {
      out[name] = value.get<std::vector<double>>();
    } else {
      out[name] = value.get<double>();
    }
  }
  return out;
}

json RewardToJson(const dsl::RewardOutput& r) {
  return json{{"total", r.total}, {"components", r.components}, {"degenerate", r.degenerate}};
}

dsl::RewardOutput RewardFromJson(const json& j) {
  dsl::RewardOutput r;
  r.total = j.at("total").get<double>();
  r.components = j.at("components").get<std::map<std::string, double>>();
  r.degenerate = j.value("degenerate", false);
  return r;
}

}  // namespace

json TraceToJson(const RolloutTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json step{{"t", s.t},
              {"action", s.action},
              {"state", StateToJson(s.state)},
              {"events",
               {{"collision", s.events.collision},
                {"unhealthy", s.events.unhealthy},
                {"success", s.events.success}}},
              {"render", s.render}};
    step["reward"] = s.reward ? RewardToJson(*s.reward) : json(nullptr);
    steps.push_back(std::move(step));
  }
  json out{{"version", kTraceVersion},
           {"id", trace.id},
           {"task", trace.task},
           {"layout", trace.layout},
           {"seed", trace.seed},
           {"horizon", trace.horizon},
           {"initial", StateToJson(trace.initial)},
           {"initial_render", trace.initial_render},
           {"steps", std::move(steps)},
           {"steps_survived", trace.steps_survived},
           {"degenerate", trace.degenerate}};
  out["success_step"] = trace.success_step ? json(*trace.success_step) : json(nullptr);
  return out;
}

RolloutTrace TraceFromJson(const json& j) {
  try {
    if (j.at("version").get<int>() != kTraceVersion) throw Error("unsupported trace version");
    RolloutTrace t;
    t.id = j.at("id").get<std::string>();
    t.task = j.at("task").get<std::string>();
    t.layout = j.value("layout", "");
    t.seed = j.at("seed").get<uint64_t>();
    t.horizon = j.at("horizon").get<int>();
    t.initial = StateFromJson(j.at("initial"));
    t.initial_render = j.value("initial_render", std::map<std::string, double>{});
    for (const auto& s : j.at("steps")) {
      TraceStep step;
      step.t = s.at("t").get<int>();
      step.action = s.at("action").get<int>();
      step.state = StateFromJson(s.at("state"));
      const json& ev = s.at("events");
      step.events.collision = ev.value("collision", false);
      step.events.unhealthy = ev.value("unhealthy", false);
      step.events.success = ev.value("success", false);
      step.render = s.value("render", std::map<std::string, double>{});
      if (s.contains("reward") && !s["reward"].is_null()) step.reward = RewardFromJson(s["reward"]);
      t.steps.push_back(std::move(step));
    }
    t.steps_survived = j.at("steps_survived").get<int>();
    if (j.contains("success_step") && !j["success_step"].is_null()) {
      t.success_step = j["success_step"].get<int>();
    }
    t.degenerate = j.value("degenerate", false);
    return t;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed trace: ") + e.what());
  }
}

std::string CheckTraceSchema(const RolloutTrace& trace, const dsl::EnvSchema& schema) {
  auto check = [&](const dsl::State& state, const std::string& where) -> std::string {
    if (state.size() != schema.size()) return where + ": binding count differs from schema";
    for (const auto& var : schema.variables()) {
      auto it = state.find(var.name);
      if (it == state.end()) return where + ": missing '" + var.name + "'";
      bool is_series = std::holds_alternative<std::vector<double>>(it->second);
      if (is_series != (var.kind == dsl::VarKind::kSeries)) {
        return where + ": wrong shape for '" + var.name + "'";
      }
      if (var.kind == dsl::VarKind::kFlag) {
        double v = std::get<double>(it->second);
        if (v != 0.0 && v != 1.0) return where + ": flag '" + var.name + "' is not 0/1";
      }
    }
    return "";
  };
  std::string err = check(trace.initial, "initial");
  if (!err.empty()) return err;
  if (static_cast<int>(trace.steps.size()) > trace.horizon) return "trace longer than horizon";
  for (const auto& step : trace.steps) {
    err = check(step.state, "step " + std::to_string(step.t));
    if (!err.empty()) return err;
  }
  return "";
}

RolloutTrace RecordRollout(Environment& env, uint64_t seed, const ActionChooser& choose,
                           const dsl::CompiledProgram* program) {
  RolloutTrace trace;
  trace.task = env.task();
  trace.layout = env.layout();
  trace.seed = seed;
  trace.horizon = env.horizon();
  env.Reset(seed);
  dsl::StateVector sv(env.schema().size());
  env.Observe(sv);
  trace.initial = dsl::ToState(env.schema(), sv);
  trace.initial_render = env.RenderInfo();
  std::vector<double> components;
  while (!env.done()) {
    TraceStep step;
    step.action = choose(env);
    step.events = env.Step(step.action);
    step.t = env.steps();
    env.Observe(sv);
    step.state = dsl::ToState(env.schema(), sv);
    step.render = env.RenderInfo();
    if (program) {
      try {
        dsl::RewardOutput r;
        r.total = program->Run(sv, components, r.degenerate);
        for (size_t i = 0; i < components.size(); ++i) {
          r.components[program->component_names()[i]] = components[i];
        }
        step.reward = std::move(r);
      } catch (const dsl::NonFiniteResult&) {
        trace.degenerate = true;
        program = nullptr;
      }
    }
    if (step.events.success && !trace.success_step) trace.success_step = step.t;
    trace.steps.push_back(std::move(step));
  }
  trace.steps_survived = env.steps();
  return trace;
}

}  // namespace revo::envs
