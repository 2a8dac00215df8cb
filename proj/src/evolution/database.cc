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

#include "revo/evolution/database.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "revo/dsl/json.h"
#include "revo/evolution/exact_mean.h"

namespace revo::evolution {

using nlohmann::json;

void CheckConfig(const EvolutionConfig& c) {
  if (c.generations < 1) throw ConfigError("generations must be >= 1");
  if (c.population < 1) throw ConfigError("population must be >= 1");
  if (c.islands < 1) throw ConfigError("islands must be >= 1");
  if (!(c.p_mutation >= 0.0 && c.p_mutation <= 1.0)) throw ConfigError("p_mutation must be in [0, 1]");
  if (c.migration_period < 1) throw ConfigError("migration_period must be >= 1");
  if (c.migration_count < 0) throw ConfigError("migration_count must be >= 0");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
}

json EvolutionConfigToJson(const EvolutionConfig& c) {
  json j = {{"generations", c.generations},
            {"population", c.population},
            {"islands", c.islands},
            {"p_mutation", c.p_mutation},
            {"migration_period", c.migration_period},
            {"migration_count", c.migration_count},
            {"termination_fitness", nullptr},
            {"seed", c.seed},
            {"workers", c.workers}};
  if (c.termination_fitness) {
    double t = *c.termination_fitness;
    if (std::isinf(t)) j["termination_fitness"] = t < 0 ? "-inf" : "inf";
    else j["termination_fitness"] = t;
  }
  return j;
}

EvolutionConfig EvolutionConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("evolution config must be an object");
  EvolutionConfig c;
  json known = EvolutionConfigToJson(c);
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown evolution field: " + key);
  try {
    c.generations = j.value("generations", c.generations);
    c.population = j.value("population", c.population);
    c.islands = j.value("islands", c.islands);
    c.p_mutation = j.value("p_mutation", c.p_mutation);
    c.migration_period = j.value("migration_period", c.migration_period);
    c.migration_count = j.value("migration_count", c.migration_count);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("termination_fitness") && !j["termination_fitness"].is_null()) {
      const json& t = j["termination_fitness"];
      // "-inf" / "inf" strings stand in for the non-finite thresholds JSON lacks.
      if (t.is_string()) {
        std::string s = t.get<std::string>();
        if (s == "-inf") c.termination_fitness = -std::numeric_limits<double>::infinity();
        else if (s == "inf") c.termination_fitness = std::numeric_limits<double>::infinity();
        else throw ConfigError("termination_fitness must be a number, \"-inf\" or \"inf\"");
      } else {
        c.termination_fitness = t.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("evolution config: ") + e.what());
  }
  CheckConfig(c);
  return c;
}

json IndividualToJson(const Individual& x) {
  return {{"id", x.id},
          {"program", dsl::ProgramToJson(x.program)},
          {"policy_ref", x.policy_ref},
          {"sigma", x.sigma},
          {"lambda", x.lambda},
          {"island", x.island},
          {"generation", x.generation},
          {"op", x.op},
          {"parents", x.parents},
          {"rollouts", x.rollouts},
          {"component_stats", fitness::StatisticsToJson(x.component_stats)},
          {"degenerate", x.degenerate},
          {"design_calls", x.design_calls}};
}

Individual IndividualFromJson(const json& j) {
  try {
    Individual x;
    x.id = j.at("id").get<std::string>();
    x.program = dsl::ProgramFromJson(j.at("program"));
    x.policy_ref = j.at("policy_ref").get<std::string>();
    x.sigma = j.at("sigma").get<double>();
    x.lambda = j.at("lambda").get<std::string>();
    x.island = j.at("island").get<int>();
    x.generation = j.at("generation").get<int>();
    x.op = j.at("op").get<std::string>();
    x.parents = j.at("parents").get<std::vector<std::string>>();
    x.rollouts = j.at("rollouts").get<std::vector<std::string>>();
    x.component_stats = fitness::StatisticsFromJson(j.at("component_stats"));
    x.degenerate = j.at("degenerate").get<bool>();
    x.design_calls = j.at("design_calls").get<int>();
    return x;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad individual: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad individual: ") + e.what());
  }
}

std::optional<double> RewardDatabase::IslandMean(size_t island) const {
  std::vector<double> sigmas;
  for (const auto& m : islands.at(island)) sigmas.push_back(m.sigma);
  return ExactMean(sigmas);
}

size_t RewardDatabase::size() const {
  size_t n = 0;
  for (const auto& i : islands) n += i.size();
  return n;
}

const Individual* RewardDatabase::Find(const std::string& id) const {
  for (const auto& island : islands)
    for (const auto& m : island)
      if (m.id == id) return &m;
  return nullptr;
}

Individual* RewardDatabase::Find(const std::string& id) {
  return const_cast<Individual*>(std::as_const(*this).Find(id));
}

std::vector<const Individual*> RewardDatabase::All() const {
  std::vector<const Individual*> out;
  for (const auto& island : islands)
    for (const auto& m : island) out.push_back(&m);
  return out;
}

json DatabaseToJson(const RewardDatabase& db) {
  json islands = json::array();
  for (const auto& island : db.islands) {
    json members = json::array();
    for (const auto& m : island) members.push_back(IndividualToJson(m));
    islands.push_back(members);
  }
  json history = json::array();
  for (const auto& r : db.match_history) history.push_back(fitness::RecordToJson(r));
  return {{"generation", db.generation}, {"islands", islands}, {"match_history", history}};
}

RewardDatabase DatabaseFromJson(const json& j) {
  RewardDatabase db;
  try {
    db.generation = j.at("generation").get<int>();
    for (const auto& island : j.at("islands")) {
      db.islands.emplace_back();
      for (const auto& m : island) db.islands.back().push_back(IndividualFromJson(m));
    }
    for (const auto& r : j.at("match_history")) db.match_history.push_back(fitness::RecordFromJson(r));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad database: ") + e.what());
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("bad database: ") + e.what());
  }
  return db;
}

size_t SampleIsland(const RewardDatabase& db, Rng& rng) {
  std::vector<double> means(db.islands.size(), 0.0);
  double lowest = std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t i = 0; i < db.islands.size(); ++i) {
    if (auto m = db.IslandMean(i)) {
      means[i] = *m;
      lowest = std::min(lowest, *m);
      any = true;
    }
  }
  if (!any) throw EmptyDatabase();
  std::vector<double> weights(db.islands.size(), 0.0);
  for (size_t i = 0; i < db.islands.size(); ++i)
    if (!db.islands[i].empty()) weights[i] = means[i] - lowest + kSamplingEpsilon;
  return WeightedIndex(rng, weights);
}

std::vector<size_t> SampleMembers(const std::vector<Individual>& members, size_t count, Rng& rng) {
  if (count > members.size()) throw Error("cannot sample more members than the island holds");
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& m : members) lowest = std::min(lowest, m.sigma);
  std::vector<double> weights;
  for (const auto& m : members) weights.push_back(m.sigma - lowest + kSamplingEpsilon);
  std::vector<size_t> out;
  for (size_t k = 0; k < count; ++k) {
    size_t i = WeightedIndex(rng, weights);
    out.push_back(i);
    weights[i] = 0.0;
  }
  return out;
}

std::vector<int> InitialIslands(int count, int islands, Rng& rng) {
  std::vector<int> order(static_cast<size_t>(islands));
  for (int i = 0; i < islands; ++i) order[static_cast<size_t>(i)] = i;
  Shuffle(order, rng);
  std::vector<int> out;
  for (int k = 0; k < count; ++k) out.push_back(order[static_cast<size_t>(k % islands)]);
  return out;
}

std::vector<bool> Select(const std::vector<Individual>& candidates, RewardDatabase& db) {
  // Candidates are judged against the islands as they were before this
  // generation, so insertion order does not matter.
  std::vector<std::vector<double>> snapshot(db.islands.size());
  for (size_t i = 0; i < db.islands.size(); ++i)
    for (const auto& m : db.islands[i]) snapshot[i].push_back(m.sigma);
  std::vector<bool> inserted;
  for (const auto& c : candidates) {
    const auto& before = snapshot.at(static_cast<size_t>(c.island));
    bool admit = before.empty() || CompareToMean(c.sigma, before) >= 0;
    if (admit) db.islands[static_cast<size_t>(c.island)].push_back(c);
    inserted.push_back(admit);
  }
  ++db.generation;
  return inserted;
}

bool BetterThan(const Individual& a, const Individual& b) {
  if (a.sigma != b.sigma) return a.sigma > b.sigma;
  if (a.generation != b.generation) return a.generation < b.generation;
  return a.id < b.id;
}

void Migrate(RewardDatabase& db, const EvolutionConfig& config, Rng& rng) {
  if (db.islands.size() < 2) return;
  for (int round = 0; round < config.migration_count; ++round) {
    std::vector<size_t> sources;
    for (size_t i = 0; i < db.islands.size(); ++i)
      if (db.islands[i].size() >= 2) sources.push_back(i);
    if (sources.empty()) return;
    size_t from = sources[UniformIndex(rng, sources.size())];
    size_t to = UniformIndex(rng, db.islands.size() - 1);
    if (to >= from) ++to;
    auto& src = db.islands[from];
    auto best = std::min_element(src.begin(), src.end(), BetterThan);
    Individual moved = *best;
    src.erase(best);
    moved.island = static_cast<int>(to);
    db.islands[to].push_back(std::move(moved));
  }
}

const Individual* BestIndividual(const RewardDatabase& db) {
  const Individual* best = nullptr;
  for (const Individual* m : db.All())
    if (!best || BetterThan(*m, *best)) best = m;
  return best;
}

}  // namespace revo::evolution
