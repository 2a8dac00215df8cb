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

#include "revo/evolution/evolution.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "revo/designer/mock_backend.h"
#include "revo/dsl/parser.h"
#include "revo/evolution/exact_mean.h"

namespace revo::evolution {
namespace {

Individual Member(std::string id, double sigma, int island = 0) {
  Individual ind;
  ind.id = std::move(id);
  ind.sigma = sigma;
  ind.island = island;
  return ind;
}

RewardDatabase DatabaseWith(const std::vector<std::vector<double>>& sigmas) {
  RewardDatabase db;
  db.islands.resize(sigmas.size());
  int n = 0;
  for (size_t i = 0; i < sigmas.size(); ++i)
    for (double s : sigmas[i])
      db.islands[i].push_back(Member("m" + std::to_string(n++), s, static_cast<int>(i)));
  return db;
}

// Acts with action 0 whatever the state.
class FixedPolicy : public trainer::Policy {
 public:
  int Act(const envs::Environment&) const override { return 0; }
  const trainer::PolicyMetadata& metadata() const override { return meta_; }
  std::string Serialize() const override { return "fixed"; }

 private:
  trainer::PolicyMetadata meta_;
};

class StubTrainer : public trainer::Trainer {
 public:
  trainer::TrainResult Train(const dsl::RewardProgram&, const envs::Environment&,
                             const trainer::TrainerConfig& config,
                             const std::string&) const override {
    trainer::TrainResult r;
    r.policy = std::make_shared<FixedPolicy>();
    r.log.steps = config.budget;
    return r;
  }
};

// Fitness is a hash of the rendered program, so it is deterministic but
// unrelated to the rollouts.
class SyntheticScorer : public Scorer {
 public:
  std::string mode() const override { return "synthetic"; }
  double MinFitness() const override { return 0.0; }
  void ScoreOne(Individual& ind, const std::vector<envs::RolloutTrace>&) const override {
    ind.sigma = static_cast<double>(Fnv1a64(dsl::Render(ind.program)) % 10007) / 10007.0;
    ind.lambda = "Positive: fast.";
  }
  void ScoreGeneration(std::vector<Individual>&, RewardDatabase&) override {}
};

// Never produces a usable reply.
class GarbageBackend : public designer::Backend {
 public:
  std::string kind() const override { return "garbage"; }
  std::string Complete(const designer::DesignRequest&, const designer::Prompt&,
                       int) const override {
    return "no code here";
  }
};

RunSpec SmallSpec(const std::string& search, uint64_t seed) {
  RunSpec spec;
  spec.task = "latch";
  spec.search = search;
  spec.evolution.generations = 4;
  spec.evolution.population = 6;
  spec.evolution.islands = 4;
  spec.evolution.seed = seed;
  spec.trainer.budget = 1000;
  return spec;
}

struct Harness {
  designer::MockBackend backend{designer::MockOptions{7, 0.0}};
  StubTrainer trainer;
  SyntheticScorer scorer;
  Collaborators collab() { return {&backend, &trainer, &scorer, nullptr}; }
};

bool NonDecreasing(const std::vector<double>& v) {
  return std::is_sorted(v.begin(), v.end());
}

TEST_CASE("config validation and JSON") {
  EvolutionConfig c;
  CHECK_NOTHROW(CheckConfig(c));
  CHECK(EvolutionConfigToJson(EvolutionConfigFromJson(EvolutionConfigToJson(c))) ==
        EvolutionConfigToJson(c));
  c.termination_fitness = -INFINITY;
  auto j = EvolutionConfigToJson(c);
  CHECK(j["termination_fitness"] == "-inf");
  CHECK(*EvolutionConfigFromJson(j).termination_fitness == -INFINITY);
  EvolutionConfig bad;
  bad.islands = 0;
  CHECK_THROWS_AS(CheckConfig(bad), ConfigError);
  bad = {};
  bad.p_mutation = 1.5;
  CHECK_THROWS_AS(CheckConfig(bad), ConfigError);
  CHECK_THROWS_AS(EvolutionConfigFromJson({{"islandz", 3}}), ConfigError);

  RunSpec spec;
  CHECK(RunSpecToJson(RunSpecFromJson(RunSpecToJson(spec))) == RunSpecToJson(spec));
  spec.search = "random";
  CHECK_THROWS_AS(CheckSpec(spec), ConfigError);
}

TEST_CASE("exact mean is correctly rounded") {
  CHECK(!ExactMean({}).has_value());
  std::vector<double> third = {0.0, 0.0, 1.0};
  CHECK(*ExactMean(third) == 1.0 / 3.0);
  std::vector<double> cancel = {1e16, 1.0, -1e16};
  CHECK(*ExactMean(cancel) == 1.0 / 3.0);
  std::vector<double> tiny = {0.1, 0.1, 0.1};
  CHECK(*ExactMean(tiny) == 0.1);  // the naive sum gives 0.30000000000000004 / 3
  CHECK(CompareToMean(0.1, tiny) == 0);
  CHECK(CompareToMean(std::nextafter(0.1, 1.0), tiny) == 1);
  CHECK(CompareToMean(std::nextafter(0.1, 0.0), tiny) == -1);

  // Oracle: values on a 2^-20 grid make n * mean and the sum exact integers
  // once scaled, so the nearest-double property can be checked in __int128.
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    size_t n = 1 + UniformIndex(rng, 300);
    std::vector<double> v;
    __int128 sum = 0;
    for (size_t i = 0; i < n; ++i) {
      auto q = static_cast<int64_t>(UniformIndex(rng, 1u << 30)) - (1 << 29);
      v.push_back(std::ldexp(static_cast<double>(q), -20));
      sum += q;
    }
    double r = *ExactMean(v);
    if (std::fabs(r) < std::ldexp(1.0, -40)) continue;
    auto distance = [&](double x) {
      __int128 scaled = static_cast<__int128>(std::ldexp(x, 92));
      __int128 d = (sum << 72) - scaled * static_cast<__int128>(n);
      return d < 0 ? -d : d;
    };
    REQUIRE(distance(r) <= distance(std::nextafter(r, INFINITY)));
    REQUIRE(distance(r) <= distance(std::nextafter(r, -INFINITY)));
    int sign = (sum << 72) > static_cast<__int128>(std::ldexp(v[0], 92)) * static_cast<__int128>(n)
                   ? -1
                   : ((sum << 72) == static_cast<__int128>(std::ldexp(v[0], 92)) *
                                         static_cast<__int128>(n)
                          ? 0
                          : 1);
    REQUIRE(CompareToMean(v[0], v) == sign);
  }
}

TEST_CASE("initial placement spreads the population") {
  Rng rng(3);
  auto placed = InitialIslands(16, 13, rng);
  std::map<int, int> sizes;
  for (int i : placed) ++sizes[i];
  CHECK(sizes.size() == 13);
  int ones = 0, twos = 0;
  for (auto [island, n] : sizes) {
    CHECK(island >= 0);
    CHECK(island < 13);
    ones += n == 1;
    twos += n == 2;
  }
  CHECK(ones == 10);
  CHECK(twos == 3);

  for (int trial = 0; trial < 200; ++trial) {
    int k = 1 + static_cast<int>(UniformIndex(rng, 40));
    int islands = 1 + static_cast<int>(UniformIndex(rng, 20));
    std::vector<int> count(static_cast<size_t>(islands), 0);
    for (int i : InitialIslands(k, islands, rng)) ++count[static_cast<size_t>(i)];
    auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    REQUIRE(*hi - *lo <= 1);
  }
}

TEST_CASE("island sampling follows shifted means") {
  Rng rng(5);
  SUBCASE("lower island is almost never drawn") {
    auto db = DatabaseWith({{1.0}, {3.0}});
    int second = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) second += SampleIsland(db, rng) == 1;
    CHECK(static_cast<double>(second) / draws >= 0.99);
  }
  SUBCASE("equal means sample uniformly") {
    auto db = DatabaseWith({{0.5}, {0.2, 0.8}, {0.5, 0.5, 0.5}});
    std::vector<int> hits(3, 0);
    const int draws = 90000;
    for (int i = 0; i < draws; ++i) ++hits[SampleIsland(db, rng)];
    double chi2 = 0.0;
    for (int h : hits) chi2 += std::pow(h - draws / 3.0, 2) / (draws / 3.0);
    CHECK(chi2 < 13.82);  // 2 dof, p = 0.001
  }
  SUBCASE("weights match shifted means") {
    auto db = DatabaseWith({{0.1}, {0.3}, {}, {0.6, 0.6}, {1.0}});
    std::vector<double> w = {kSamplingEpsilon, 0.2 + kSamplingEpsilon, 0.0,
                             0.5 + kSamplingEpsilon, 0.9 + kSamplingEpsilon};
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<int> hits(5, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++hits[SampleIsland(db, rng)];
    CHECK(hits[2] == 0);
    double chi2 = 0.0;
    for (size_t i : {1u, 3u, 4u}) chi2 += std::pow(hits[i] - draws * w[i] / total, 2) / (draws * w[i] / total);
    CHECK(chi2 < 13.82);
  }
  SUBCASE("single island and empty database") {
    auto db = DatabaseWith({{0.4, 0.9}});
    for (int i = 0; i < 100; ++i) CHECK(SampleIsland(db, rng) == 0);
    CHECK_THROWS_AS(SampleIsland(DatabaseWith({{}, {}}), rng), EmptyDatabase);
  }
}

TEST_CASE("member sampling draws distinct members by shifted fitness") {
  Rng rng(9);
  auto db = DatabaseWith({{0.0, 0.25, 1.0}});
  const auto& members = db.islands[0];
  std::vector<int> first(3, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    auto pick = SampleMembers(members, 2, rng);
    REQUIRE(pick.size() == 2);
    REQUIRE(pick[0] != pick[1]);
    ++first[pick[0]];
  }
  double total = 1.25 + 3 * kSamplingEpsilon;
  CHECK(static_cast<double>(first[2]) / draws == doctest::Approx(1.0 / total).epsilon(0.02));
  CHECK(static_cast<double>(first[0]) / draws < 0.001);
}

TEST_CASE("selection admits candidates at or above the island mean") {
  auto db = DatabaseWith({{0.4, 0.6}, {}});
  std::vector<Individual> cands = {Member("a", 0.5, 0), Member("b", 0.49, 0), Member("c", 0.1, 1)};
  auto inserted = Select(cands, db);
  CHECK(inserted == std::vector<bool>{true, false, true});
  CHECK(db.islands[0].size() == 3);
  CHECK(db.islands[1].size() == 1);
  CHECK(db.generation == 1);

  // Both compare against the mean before the generation (0.5), not after
  // the first insertion (0.75).
  auto snap = DatabaseWith({{0.5}});
  auto both = Select({Member("x", 1.0), Member("y", 0.6)}, snap);
  CHECK(both == std::vector<bool>{true, true});
}

TEST_CASE("selection never lowers an island mean") {
  Rng rng(21);
  // Values that do not sum exactly in binary are the interesting ones.
  const std::vector<double> grid = {0.1, 0.2, 0.3, 1.0 / 3.0, 0.7, 2.0 / 3.0, 0.9};
  int insertions = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    size_t islands = 1 + UniformIndex(rng, 5);
    RewardDatabase db;
    db.islands.resize(islands);
    for (int gen = 0; gen < 6; ++gen) {
      std::vector<std::optional<double>> before;
      for (size_t i = 0; i < islands; ++i) before.push_back(db.IslandMean(i));
      std::vector<Individual> cands;
      for (int k = 0; k < 6; ++k) {
        int island = static_cast<int>(UniformIndex(rng, islands));
        double s = grid[UniformIndex(rng, grid.size())];
        auto m = before[static_cast<size_t>(island)];
        if (m && Bernoulli(rng, 0.3)) s = *m;  // sit exactly on the computed mean
        cands.push_back(Member("c", s, island));
      }
      auto inserted = Select(cands, db);
      for (bool b : inserted) insertions += b;
      for (size_t i = 0; i < islands; ++i) {
        if (!before[i]) continue;
        REQUIRE(*db.IslandMean(i) >= *before[i]);
      }
    }
  }
  CHECK(insertions > 1000);
}

TEST_CASE("migration moves the fittest member to another island") {
  EvolutionConfig cfg;
  cfg.migration_count = 1;
  Rng rng(1);
  auto db = DatabaseWith({{0.2, 0.9, 0.5}, {0.4}});
  Migrate(db, cfg, rng);
  CHECK(db.islands[0].size() == 2);
  CHECK(db.islands[1].size() == 2);
  CHECK(db.islands[1].back().sigma == 0.9);
  CHECK(db.islands[1].back().island == 1);

  auto singles = DatabaseWith({{0.1}, {0.2}, {0.3}});
  auto before = DatabaseToJson(singles);
  Migrate(singles, cfg, rng);
  CHECK(DatabaseToJson(singles) == before);

  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<double>> sig(2 + UniformIndex(rng, 4));
    for (auto& s : sig)
      for (size_t n = UniformIndex(rng, 4); n > 0; --n) s.push_back(UniformDouble(rng));
    auto d = DatabaseWith(sig);
    std::multiset<std::string> ids;
    for (const auto* m : d.All()) ids.insert(m->id);
    cfg.migration_count = 1 + static_cast<int>(UniformIndex(rng, 3));
    Migrate(d, cfg, rng);
    std::multiset<std::string> after;
    for (const auto* m : d.All()) after.insert(m->id);
    REQUIRE(ids == after);
    for (size_t i = 0; i < d.islands.size(); ++i)
      for (const auto& m : d.islands[i]) REQUIRE(m.island == static_cast<int>(i));
  }
}

TEST_CASE("database and individuals survive JSON") {
  auto db = DatabaseWith({{0.25, 0.5}, {}, {1.0}});
  db.islands[0][0].program = dsl::Parse("component a = 1\n");
  db.islands[0][0].parents = {"p1", "p2"};
  db.generation = 3;
  auto j = DatabaseToJson(db);
  CHECK(DatabaseToJson(DatabaseFromJson(j)) == j);
  CHECK(BestIndividual(db)->sigma == 1.0);
  CHECK(BestIndividual(RewardDatabase{}) == nullptr);
}

TEST_CASE("runs are deterministic and independent of worker count") {
  Harness h;
  auto spec = SmallSpec("revolve", 42);
  auto a = Evolution(spec, h.collab()).Run();
  auto b = Evolution(spec, h.collab()).Run();
  CHECK(ResultToJson(a).dump() == ResultToJson(b).dump());
  spec.evolution.workers = 3;
  auto c = Evolution(spec, h.collab()).Run();
  CHECK(ResultToJson(a).dump() == ResultToJson(c).dump());

  CHECK(a.best_trace.size() == 4);
  CHECK(NonDecreasing(a.best_trace));
  CHECK(a.design_calls == 24);
  CHECK(a.training_jobs == 24);
  CHECK(a.training_steps == 24 * 1000);
  CHECK(a.metrics.front().operators.at("init") == 6);
  CHECK(a.database.generation == 4);
  CHECK(a.best.sigma == a.best_trace.back());
}

TEST_CASE("one generation returns the best initial design") {
  Harness h;
  auto spec = SmallSpec("revolve", 8);
  spec.evolution.generations = 1;
  auto r = Evolution(spec, h.collab()).Run();
  CHECK(r.best_trace.size() == 1);
  CHECK(r.database.size() == 6);
  CHECK(r.best.id == BestIndividual(r.database)->id);
}

TEST_CASE("a termination fitness of -inf stops after the first generation") {
  Harness h;
  auto spec = SmallSpec("revolve", 8);
  spec.evolution.termination_fitness = -INFINITY;
  auto r = Evolution(spec, h.collab()).Run();
  CHECK(r.terminated_early);
  CHECK(r.best_trace.size() == 1);
  CHECK(r.design_calls == 6);
}

TEST_CASE("revolve and greedy spend equal budgets") {
  Harness h;
  for (uint64_t seed : {1u, 2u, 3u}) {
    auto rev = Evolution(SmallSpec("revolve", seed), h.collab()).Run();
    auto greedy = Evolution(SmallSpec("greedy", seed), h.collab()).Run();
    CHECK(rev.design_calls == greedy.design_calls);
    CHECK(rev.training_jobs == greedy.training_jobs);
    CHECK(rev.training_steps == greedy.training_steps);
    CHECK(NonDecreasing(rev.best_trace));
    CHECK(NonDecreasing(greedy.best_trace));
    // Greedy keeps a single lineage on one island.
    for (size_t i = 1; i < greedy.database.islands.size(); ++i)
      CHECK(greedy.database.islands[i].empty());
    for (const auto& m : greedy.metrics)
      if (m.generation > 1) CHECK(m.operators.at("mutate") == 6);
  }
}

TEST_CASE("interrupted runs resume to the same result") {
  Harness h;
  auto spec = SmallSpec("revolve", 77);
  auto full = Evolution(spec, h.collab()).Run();

  for (int stop_after : {3, 6, 10, 17}) {
    CAPTURE(stop_after);
    nlohmann::json last;
    int finished = 0;
    RunHooks hooks;
    hooks.on_checkpoint = [&](const nlohmann::json& j) { last = j; };
    hooks.interrupt = [&] { return ++finished == stop_after; };
    Evolution first(spec, h.collab());
    CHECK_THROWS_AS(first.Run(hooks), Interrupted);
    CHECK(!first.finished());

    // Round-trip through text as a file-backed store would.
    Evolution resumed(nlohmann::json::parse(last.dump()), h.collab());
    auto r = resumed.Run();
    CHECK(ResultToJson(r).dump() == ResultToJson(full).dump());
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  Harness h;
  Evolution e(SmallSpec("revolve", 1), h.collab());
  auto j = e.Checkpoint();
  j["version"] = kCheckpointVersion + 1;
  CHECK_THROWS_AS(Evolution(j, h.collab()), CheckpointError);
  CHECK_THROWS_AS(Evolution(nlohmann::json::object(), h.collab()), CheckpointError);
}

TEST_CASE("a generation with no usable design raises DesignerExhausted") {
  GarbageBackend garbage;
  StubTrainer trainer;
  SyntheticScorer scorer;
  auto spec = SmallSpec("revolve", 1);
  spec.design_retries = 1;
  spec.max_resamples = 2;
  Evolution e(spec, {&garbage, &trainer, &scorer, nullptr});
  CHECK_THROWS_AS(e.Run(), designer::DesignerExhausted);
}

TEST_CASE("unreliable designer replies are retried without changing the budget") {
  designer::MockBackend flaky(designer::MockOptions{3, 0.3});
  StubTrainer trainer;
  SyntheticScorer scorer;
  auto r = Evolution(SmallSpec("revolve", 4), {&flaky, &trainer, &scorer, nullptr}).Run();
  CHECK(r.training_jobs == 24);
  CHECK(r.design_calls >= 24);
  CHECK(NonDecreasing(r.best_trace));
}

TEST_CASE("real training on latch with automatic fitness") {
  designer::MockBackend backend(designer::MockOptions{1, 0.0});
  trainer::QLearningTrainer trainer;
  AutoScorer scorer("latch");
  auto spec = SmallSpec("revolve", 5);
  spec.trainer.budget = 20000;
  auto r = Evolution(spec, {&backend, &trainer, &scorer, nullptr}).Run();
  CHECK(NonDecreasing(r.best_trace));
  CHECK(r.best.sigma > 0.5);
  CHECK(!r.best.lambda.empty());
  CHECK(r.best.rollouts.size() == 5);
  CHECK(!r.best.component_stats.empty());
}

}  // namespace
}  // namespace revo::evolution
