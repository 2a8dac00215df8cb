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

#ifndef REVO_EVOLUTION_DATABASE_H_
#define REVO_EVOLUTION_DATABASE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revo/common/error.h"
#include "revo/common/random.h"
#include "revo/dsl/ast.h"
#include "revo/fitness/component_stats.h"
#include "revo/fitness/elo.h"

namespace revo::evolution {

// Shift added to fitness-proportional weights so the worst member keeps a
// small chance.
inline constexpr double kSamplingEpsilon = 1e-6;

struct EvolutionConfig {
  int generations = 7;   // N, counting the initial population as generation 1
  int population = 16;   // K, individuals designed per generation
  int islands = 13;      // I
  double p_mutation = 0.5;
  int migration_period = 2;
  int migration_count = 1;
  std::optional<double> termination_fitness;
  uint64_t seed = 0;
  int workers = 1;  // concurrent design/train/score pipelines
};

// Throws ConfigError when an invariant is violated.
void CheckConfig(const EvolutionConfig& config);
nlohmann::json EvolutionConfigToJson(const EvolutionConfig& config);
EvolutionConfig EvolutionConfigFromJson(const nlohmann::json& j);

struct Individual {
  std::string id;
  dsl::RewardProgram program;
  std::string policy_ref;  // empty when the policy was not persisted
  double sigma = 0.0;
  std::string lambda;
  int island = 0;
  int generation = 0;
  std::string op;  // init | mutate | crossover
  std::vector<std::string> parents;
  std::vector<std::string> rollouts;  // trace ids
  fitness::ComponentStatistics component_stats;
  bool degenerate = false;  // reward rejected during training
  int design_calls = 0;
};

nlohmann::json IndividualToJson(const Individual& individual);
Individual IndividualFromJson(const nlohmann::json& j);

class EmptyDatabase : public Error {
 public:
  EmptyDatabase() : Error("reward database has no individuals") {}
};

struct RewardDatabase {
  std::vector<std::vector<Individual>> islands;
  std::vector<fitness::PreferenceRecord> match_history;
  int generation = 0;  // completed generations

  // Arithmetic mean of member sigmas; nullopt for an empty island.
  std::optional<double> IslandMean(size_t island) const;
  size_t size() const;
  const Individual* Find(const std::string& id) const;
  Individual* Find(const std::string& id);
  std::vector<const Individual*> All() const;
};

nlohmann::json DatabaseToJson(const RewardDatabase& db);
RewardDatabase DatabaseFromJson(const nlohmann::json& j);

// Island index drawn with probability proportional to
// mean(P) - min_Q mean(Q) + kSamplingEpsilon over non-empty islands.
// Throws EmptyDatabase.
size_t SampleIsland(const RewardDatabase& db, Rng& rng);

// `count` distinct members (count <= members.size()) drawn one at a time with
// probability proportional to sigma - min sigma + kSamplingEpsilon.
std::vector<size_t> SampleMembers(const std::vector<Individual>& members, size_t count, Rng& rng);

// Island of each of `count` initial individuals: round-robin over a seeded
// permutation of the islands.
std::vector<int> InitialIslands(int count, int islands, Rng& rng);

// Inserts each candidate whose sigma reaches the mean of its target island as
// it stood before this call (an empty island admits anything), then advances
// the generation counter. Returns one flag per candidate.
std::vector<bool> Select(const std::vector<Individual>& candidates, RewardDatabase& db);

// migration_count times: moves the highest-sigma member of a uniformly chosen
// island holding >= 2 members to a uniformly chosen other island. No-op when
// no island has two members or there is a single island.
void Migrate(RewardDatabase& db, const EvolutionConfig& config, Rng& rng);

// Highest sigma; ties go to the earliest generation, then the lowest id.
const Individual* BestIndividual(const RewardDatabase& db);
bool BetterThan(const Individual& a, const Individual& b);

}  // namespace revo::evolution

#endif  // REVO_EVOLUTION_DATABASE_H_
