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

#include "revo/fitness/component_stats.h"

#include <algorithm>
#include <cstdio>

namespace revo::fitness {

using nlohmann::json;

void Accumulator::Add(double v) {
  if (count == 0) {
    min = max = v;
  } else {
    min = std::min(min, v);
    max = std::max(max, v);
  }
  sum += v;
  ++count;
}

namespace {

json AccToJson(const Accumulator& a) {
  return json{{"min", a.min}, {"max", a.max}, {"sum", a.sum}, {"count", a.count}};
}

Accumulator AccFromJson(const json& j) {
  Accumulator a;
  a.min = j.at("min").get<double>();
  a.max = j.at("max").get<double>();
  a.sum = j.at("sum").get<double>();
  a.count = j.at("count").get<int64_t>();
  return a;
}

std::string Short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

json TrainingLogToJson(const TrainingLog& log) {
  json cps = json::array();
  for (const auto& cp : log.checkpoints) {
    json comps = json::object();
    for (const auto& [name, acc] : cp.components) comps[name] = AccToJson(acc);
    cps.push_back({{"step", cp.step}, {"components", comps}, {"total", AccToJson(cp.total)}});
  }
  return json{{"checkpoints", cps},
              {"episode_lengths", log.episode_lengths},
              {"steps", log.steps},
              {"evaluations", log.evaluations},
              {"degenerate", log.degenerate}};
}

TrainingLog TrainingLogFromJson(const json& j) {
  TrainingLog log;
  for (const auto& cp : j.at("checkpoints")) {
    CheckpointRecord r;
    r.step = cp.at("step").get<int64_t>();
    for (const auto& [name, acc] : cp.at("components").items()) r.components[name] = AccFromJson(acc);
    r.total = AccFromJson(cp.at("total"));
    log.checkpoints.push_back(std::move(r));
  }
  log.episode_lengths = j.at("episode_lengths").get<std::vector<int>>();
  log.steps = j.at("steps").get<int64_t>();
  log.evaluations = j.at("evaluations").get<int64_t>();
  log.degenerate = j.at("degenerate").get<int64_t>();
  return log;
}

ComponentStatistics ComputeComponentStatistics(const TrainingLog& log) {
  ComponentStatistics out;
  for (const auto& cp : log.checkpoints) {
    for (const auto& [name, acc] : cp.components) {
      if (acc.count == 0) continue;
      out[name].push_back({acc.min, acc.mean(), acc.max});
    }
  }
  return out;
}

json StatisticsToJson(const ComponentStatistics& stats) {
  json out = json::object();
  for (const auto& [name, list] : stats) {
    json arr = json::array();
    for (const auto& s : list) arr.push_back(json::array({s.min, s.mean, s.max}));
    out[name] = arr;
  }
  return out;
}

ComponentStatistics StatisticsFromJson(const json& j) {
  ComponentStatistics out;
  for (const auto& [name, arr] : j.items()) {
    for (const auto& t : arr) {
      out[name].push_back({t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()});
    }
  }
  return out;
}

std::string FormatStatistics(const ComponentStatistics& stats,
                             const std::vector<std::string>& order) {
  std::vector<std::string> names = order;
  for (const auto& [name, _] : stats) {
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  std::string out;
  for (const auto& name : names) {
    auto it = stats.find(name);
    if (it == stats.end()) continue;
    std::string mins, means, maxs;
    for (const auto& s : it->second) {
      if (!mins.empty()) {
        mins += ", ";
        means += ", ";
        maxs += ", ";
      }
      mins += Short(s.min);
      means += Short(s.mean);
      maxs += Short(s.max);
    }
    out += name + ": min [" + mins + "], mean [" + means + "], max [" + maxs + "]\n";
  }
  return out;
}

}  // namespace revo::fitness
