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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 only
// when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "revo/common/resources.h"
#include "revo/designer/mock_backend.h"
#include "revo/dsl/diff.h"
#include "revo/dsl/evaluate.h"
#include "revo/dsl/parser.h"
#include "revo/envs/env.h"
#include "revo/envs/latch_world.h"
#include "revo/evolution/evolution.h"
#include "revo/fitness/auto_fitness.h"
#include "revo/fitness/elo.h"
#include "revo/orchestrator/runner.h"
#include "revo/trainer/trainer.h"

namespace {

using namespace revo;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

fs::path g_source_dir = REVO_SOURCE_DIR;

std::string Fixture(const std::string& name) {
  return ReadFile(g_source_dir / "fixtures/rewards" / name);
}

// 1. Fitness formulas against exact values.
void FitnessOracles(Verdict& v) {
  fitness::ManipulationParams paper{50, 400};
  v.Require(std::fabs(fitness::ManipulationFitness(50, true, paper) - 1.0) < 1e-12, "manip(50)");
  v.Require(std::fabs(fitness::ManipulationFitness(400, true, paper) - 0.5) < 1e-12, "manip(400)");
  v.Require(std::fabs(paper.a() - (-1.0 / 700.0)) < 1e-15 && std::fabs(paper.b() - 75.0 / 70.0) < 1e-15,
            "manipulation constants");
  v.Require(fitness::ManipulationFitness(120, false, paper) == 0.0, "manip failure");
  v.Require(fitness::DrivingStepScore(9.75, 0.2, false) == 1.0, "driving plateau");
  Rng rng(1);
  bool collisions = true, locomotion = true;
  for (int i = 0; i < 1000; ++i) {
    double speed = UniformRange(rng, -5, 30), d = UniformRange(rng, 0, 10);
    collisions = collisions && fitness::DrivingStepScore(speed, d, true) == -1.0;
    int horizon = 2 + static_cast<int>(UniformIndex(rng, 300));
    size_t survived = UniformIndex(rng, static_cast<size_t>(horizon));  // < horizon
    std::vector<double> vel(survived);
    for (auto& x : vel) x = UniformRange(rng, 0, 5);
    locomotion = locomotion && fitness::LocomotionFitness(vel, horizon) == 0.0;
  }
  v.Require(collisions, "collision step != -1");
  v.Require(locomotion, "locomotion sigma nonzero before the horizon");
  v.detail << "manip(50)=" << fitness::ManipulationFitness(50, true, paper)
           << " manip(400)=" << fitness::ManipulationFitness(400, true, paper)
           << " step(9.75,0.2)=" << fitness::DrivingStepScore(9.75, 0.2, false);
}

// 2. Elo properties.
void EloProperties(Verdict& v) {
  Rng rng(2);
  double worst_sum = 0.0, worst_norm = 0.0;
  fitness::EloState state;
  std::vector<fitness::PreferenceRecord> history;
  for (int i = 0; i < 10000; ++i) {
    fitness::PreferenceRecord r;
    r.individual_a = "p" + std::to_string(UniformIndex(rng, 50));
    do r.individual_b = "p" + std::to_string(UniformIndex(rng, 50));
    while (r.individual_b == r.individual_a);
    r.outcome = static_cast<fitness::Outcome>(UniformIndex(rng, 3));
    r.timestamp = i + 1;
    double a0 = state.Rating(r.individual_a), b0 = state.Rating(r.individual_b);
    state.Update(r);
    double da = state.Rating(r.individual_a) - a0, db = state.Rating(r.individual_b) - b0;
    worst_sum = std::max(worst_sum, std::fabs(da + db));
    auto [ea, eb] = fitness::EloExpected(a0, b0);
    worst_norm = std::max(worst_norm, std::fabs(ea + eb - 1.0));
    history.push_back(r);
  }
  v.Require(worst_sum < 1e-9, "zero-sum");
  v.Require(worst_norm < 1e-12, "expected-score normalization");
  fitness::PreferenceRecord win;
  win.individual_a = "A";
  win.individual_b = "B";
  win.outcome = fitness::Outcome::kAWins;
  auto r = fitness::RerateAll({win});
  v.Require(r["A"] == 1516.0 && r["B"] == 1484.0, "equal-rated win");
  v.Require(fitness::RerateAll(history) == fitness::RerateAll(history), "rerate determinism");
  v.Require(fitness::RerateAll(history) == state.ratings(), "rerate equals incremental replay");
  v.detail << "max|dA+dB|=" << worst_sum << " max|Ea+Eb-1|=" << worst_norm;
}

// 3. Selection never lowers an island mean.
void SelectionMonotonicity(Verdict& v) {
  Rng rng(3);
  const std::vector<double> grid = {0.1, 0.2, 0.3, 1.0 / 3.0, 0.7, 2.0 / 3.0, 0.9, 1e-3, 1516.0};
  long checks = 0, insertions = 0;
  bool ok = true;
  for (int seq = 0; seq < 1000 && ok; ++seq) {
    size_t islands = 1 + UniformIndex(rng, 13);
    evolution::RewardDatabase db;
    db.islands.resize(islands);
    std::vector<std::optional<double>> last(islands);
    int generations = 1 + static_cast<int>(UniformIndex(rng, 10));
    for (int g = 0; g < generations && ok; ++g) {
      std::vector<evolution::Individual> cands;
      int k = 1 + static_cast<int>(UniformIndex(rng, 16));
      for (int c = 0; c < k; ++c) {
        evolution::Individual ind;
        ind.island = static_cast<int>(UniformIndex(rng, islands));
        auto mean = db.IslandMean(static_cast<size_t>(ind.island));
        double roll = UniformDouble(rng);
        ind.sigma = mean && roll < 0.3 ? *mean
                    : roll < 0.6       ? grid[UniformIndex(rng, grid.size())]
                                       : UniformRange(rng, -1, 1);
        cands.push_back(ind);
      }
      for (bool b : evolution::Select(cands, db)) insertions += b;
      for (size_t i = 0; i < islands; ++i) {
        auto now = db.IslandMean(i);
        if (last[i]) {
          ++checks;
          ok = ok && now && *now >= *last[i];
        }
        last[i] = now;
      }
    }
  }
  v.Require(ok, "an island mean decreased");
  v.detail << checks << " snapshot comparisons, " << insertions << " insertions";
}

std::vector<dsl::Expr> Inlined(const dsl::RewardProgram& p) {
  std::vector<dsl::Expr> out;
  for (const auto& c : p.components)
    out.push_back(dsl::RewriteExpr(c.expr, [&](const dsl::Node& n) -> dsl::Expr {
      return n.kind == dsl::NodeKind::kParam ? dsl::MakeConstant(p.FindParam(n.name)->value) : nullptr;
    }));
  return out;
}

bool Contains(const std::vector<dsl::Expr>& set, const dsl::Expr& e) {
  for (const auto& x : set)
    if (dsl::ExprEqual(x, e)) return true;
  return false;
}

// 4. Mock operator structure.
void OperatorStructure(Verdict& v) {
  using designer::Operator;
  const char* tasks[] = {"drive", "strider", "latch"};
  designer::MockBackend mock({21, 0.0});
  auto request = [](Operator op, const std::string& task, std::vector<designer::ParentInfo> parents,
                    uint64_t nonce) {
    designer::DesignRequest r;
    r.op = op;
    r.task = task;
    r.schema = envs::TaskSchema(task);
    r.parents = std::move(parents);
    r.nonce = nonce;
    return r;
  };
  auto parent = [](dsl::RewardProgram p) {
    designer::ParentInfo info;
    info.id = "p";
    info.program = std::move(p);
    return info;
  };
  int mutations = 0, bad_mutations = 0;
  for (uint64_t chain = 0; chain < 100; ++chain) {
    std::string task = tasks[chain % 3];
    dsl::RewardProgram current =
        designer::Design(mock, request(Operator::kInit, task, {}, chain)).program;
    for (int step = 0; step < 10; ++step) {
      auto child = designer::Design(mock, request(Operator::kMutate, task, {parent(current)},
                                                  chain * 100 + static_cast<uint64_t>(step)))
                       .program;
      bad_mutations += dsl::DiffComponents(current, child).ChangeCount() != 1;
      ++mutations;
      current = child;
    }
  }
  int crossovers = 0, bad_crossovers = 0;
  for (uint64_t n = 0; n < 1000; ++n) {
    std::string task = tasks[n % 3];
    auto a = designer::Design(mock, request(Operator::kInit, task, {}, 5000 + 2 * n)).program;
    auto b = designer::Design(mock, request(Operator::kInit, task, {}, 5001 + 2 * n)).program;
    auto child =
        designer::Design(mock, request(Operator::kCrossover, task, {parent(a), parent(b)}, n)).program;
    auto ea = Inlined(a), eb = Inlined(b);
    int from_a = 0, from_b = 0;
    bool foreign = false;
    for (const auto& e : Inlined(child)) {
      bool in_a = Contains(ea, e), in_b = Contains(eb, e);
      foreign = foreign || !(in_a || in_b);
      from_a += in_a;
      from_b += in_b;
    }
    bad_crossovers += foreign || from_a < 1 || from_b < 1;
    ++crossovers;
  }
  v.Require(bad_mutations == 0, "mutation changed other than one component");
  v.Require(bad_crossovers == 0, "crossover child outside parent union or one-sided");
  v.detail << mutations << " mutations (" << bad_mutations << " bad), " << crossovers
           << " crossovers (" << bad_crossovers << " bad)";
}

// 5. Revolve versus greedy at equal budgets.
void Benchmark(Verdict& v, int seeds) {
  orchestrator::BenchOptions opts;
  opts.tasks = {"latch", "drive"};
  opts.seeds = seeds;
  nlohmann::json out = orchestrator::RunBench(opts);
  for (const auto& task : opts.tasks) {
    const auto& s = out["summary"][task];
    v.Require(s["revolve_at_least_greedy"].get<bool>(), task + ": median revolve < median greedy");
    v.Require(s["traces_non_decreasing"].get<bool>(), task + ": decreasing best trace");
    v.Require(s["budgets_equal"].get<bool>(), task + ": unequal budgets");
    v.detail << task << " median revolve " << s["median_revolve"].get<double>() << " vs greedy "
             << s["median_greedy"].get<double>() << "; ";
  }
  v.detail << seeds << " seeds, N7 K16";
}

// Breadth-first search over the deterministic latch transitions.
int LatchBfs() {
  using envs::LatchWorld;
  std::vector<int> dist(LatchWorld{}.num_states(), -1);
  std::deque<LatchWorld::Cell> queue = {LatchWorld::Cell{}};
  dist[LatchWorld::Index({})] = 0;
  while (!queue.empty()) {
    auto c = queue.front();
    queue.pop_front();
    if (LatchWorld::IsOpen(c)) return dist[LatchWorld::Index(c)];
    for (int a = 0; a < 7; ++a) {
      auto n = LatchWorld::Transition(c, a);
      if (dist[LatchWorld::Index(n)] >= 0) continue;
      dist[LatchWorld::Index(n)] = dist[LatchWorld::Index(c)] + 1;
      queue.push_back(n);
    }
  }
  return -1;
}

// 6. Dense shaping on LatchWorld solves within twice the minimal steps.
void TrainerSanity(Verdict& v) {
  int minimal = LatchBfs();
  v.Require(minimal == envs::LatchMinimalSteps(), "BFS disagrees with the fixture constant");
  auto program = dsl::Parse(Fixture("latch_dense.dsl"));
  envs::LatchWorld env;
  int solved = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    trainer::TrainerConfig c = trainer::DefaultTrainerConfig("latch");
    c.seed = seed;
    auto r = trainer::QLearningTrainer().Train(program, env, c);
    auto traces = trainer::Evaluate(*r.policy, env, {1000 + seed});
    if (traces[0].success_step && *traces[0].success_step <= 2 * minimal) ++solved;
  }
  v.Require(solved >= 8, "fewer than 8/10 seeds solved");
  v.detail << "BFS minimum " << minimal << ", solved within " << 2 * minimal << " on " << solved
           << "/10 seeds";
}

// 7. Byte-identical reruns and resume after an interruption.
void DeterminismAndResume(Verdict& v) {
  struct Case {
    std::string task;
    int generations, population;
    int stop_after;
  };
  for (const Case& c : {Case{"latch", 7, 16, 40}, Case{"drive", 3, 6, 9}}) {
    evolution::RunSpec spec;
    spec.task = c.task;
    spec.evolution.generations = c.generations;
    spec.evolution.population = c.population;
    spec.evolution.seed = 11;
    designer::MockBackend backend({11, 0.1});
    trainer::QLearningTrainer trainer;
    evolution::AutoScorer scorer(c.task);
    evolution::Collaborators collab{&backend, &trainer, &scorer, nullptr};
    std::string first = evolution::ResultToJson(evolution::Evolution(spec, collab).Run()).dump();
    std::string second = evolution::ResultToJson(evolution::Evolution(spec, collab).Run()).dump();
    v.Require(first == second, c.task + ": rerun differs");

    nlohmann::json last;
    int finished = 0;
    evolution::RunHooks hooks;
    hooks.on_checkpoint = [&](const nlohmann::json& j) { last = j; };
    hooks.interrupt = [&] { return ++finished == c.stop_after; };
    bool interrupted = false;
    try {
      evolution::Evolution(spec, collab).Run(hooks);
    } catch (const evolution::Interrupted&) {
      interrupted = true;
    }
    v.Require(interrupted, c.task + ": run was not interrupted");
    int done_slots = static_cast<int>(last["pending"].size());
    evolution::Evolution resumed(nlohmann::json::parse(last.dump()), collab);
    std::string after = evolution::ResultToJson(resumed.Run()).dump();
    v.Require(after == first, c.task + ": resumed result differs");
    v.detail << c.task << " N" << c.generations << " K" << c.population << ": stopped in generation "
             << last["database"]["generation"].get<int>() + 1 << " with " << done_slots << "/"
             << c.population << " slots done, " << first.size() << " result bytes identical; ";
  }
}

// 8. Hand-designed driving reward against hand-computed values.
void BaselineTranscription(Verdict& v) {
  auto program = dsl::Parse(Fixture("drive_hed.dsl"));
  const auto& schema = envs::TaskSchema("drive");
  dsl::CompiledProgram compiled(program, schema);
  struct Row {
    double min_pos, speed, distance;
    std::vector<double> actions;
  };
  const Row rows[] = {{0.0, 9.0, 20.0, {}},
                      {1.5, 7.2, 3.0, {0.2, -0.4, 0.6, 0.0}},
                      {0.3, 12.0, 6.0, {1, 1, 1, -1}},
                      {0.8, 10.0, 5.0, {0.1, 0.1}},
                      {2.0, 16.0, 0.0, {0.5}}};
  // Closed forms, written out independently of the interpreter.
  auto pos = [](const Row& r) { return std::exp(-0.2 * (r.min_pos * r.min_pos - 0.25)); };
  auto speed = [](const Row& r) {
    if (r.speed < 9.0) return -std::fabs(r.speed - 9.0) / 9.0;
    if (r.speed > 10.5) return -std::fabs(r.speed - 10.5) / r.speed;
    return 1.0;
  };
  auto sensor = [](const Row& r) { return r.distance < 6.0 ? -(6.0 - r.distance) / 6.0 : 0.5; };
  auto smooth = [](const Row& r) {
    if (r.actions.size() < 2) return 0.0;
    double m = 0.0, s = 0.0;
    for (double a : r.actions) m += a;
    m /= static_cast<double>(r.actions.size());
    for (double a : r.actions) s += (a - m) * (a - m);
    return -0.5 * std::sqrt(s / static_cast<double>(r.actions.size()));
  };
  double worst = 0.0;
  for (const Row& r : rows) {
    dsl::StateVector sv(schema.variables().size());
    auto set = [&](const char* name, double x) { sv.scalars[*schema.IndexOf(name)] = x; };
    set("speed", r.speed);
    set("min_pos", r.min_pos);
    set("distance", r.distance);
    sv.series[*schema.IndexOf("action_list")] = r.actions;
    std::map<std::string, double> want = {
        {"pos", pos(r)}, {"speed", speed(r)}, {"sensor", sensor(r)}, {"smoothness", smooth(r)}};
    double total = 0.25 * want["pos"] + 0.25 * want["smoothness"] + 0.25 * want["speed"] +
                   0.25 * want["sensor"];
    dsl::RewardOutput interp = dsl::Evaluate(program, dsl::ToState(schema, sv));
    dsl::RewardOutput fast = compiled.Evaluate(sv);
    for (const auto& [name, value] : want) {
      worst = std::max(worst, std::fabs(interp.components.at(name) - value));
      worst = std::max(worst, std::fabs(fast.components.at(name) - value));
    }
    worst = std::max({worst, std::fabs(interp.total - total), std::fabs(fast.total - total)});
    v.Require(interp.total == fast.total, "interpreter and compiled routes disagree");
  }
  v.Require(worst < 1e-9, "value outside 1e-9");
  v.Require(std::fabs(pos(rows[0]) - 1.0513) < 5e-5, "position example");
  v.detail << "5 states, both evaluation routes, max error " << worst << ", pos(min_pos=0) = "
           << pos(rows[0]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  int seeds = 10;
  std::string source;
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--seeds", seeds, "Benchmark seeds per task");
  app.add_option("--source-dir", source, "Repository root (fixtures)");
  CLI11_PARSE(app, argc, argv);
  if (!source.empty()) g_source_dir = source;

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Verdict&)> run;
  };
  std::vector<Criterion> criteria = {
      {1, "fitness formula oracles", 1, FitnessOracles},
      {2, "Elo properties", 1, EloProperties},
      {3, "selection monotonicity", 10, SelectionMonotonicity},
      {4, "operator structure", 10, OperatorStructure},
      {5, "revolve vs greedy benchmark", 1800, [&](Verdict& v) { Benchmark(v, seeds); }},
      {6, "trainer sanity", 300, TrainerSanity},
      {7, "determinism and resume", 600, DeterminismAndResume},
      {8, "baseline transcription", 1, BaselineTranscription},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Verdict v;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.Require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.Require(secs < c.budget_seconds, "over the runtime budget");
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << std::fixed
              << std::setprecision(2) << secs << " s): " << std::defaultfloat << v.detail.str()
              << std::endl;
  }
  return all ? 0 : 1;
}
