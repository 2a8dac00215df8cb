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
#include <cstdio>
#include <mutex>

#include "revo/common/parallel.h"
#include "revo/common/random.h"
#include "revo/fitness/component_stats.h"

namespace revo::evolution {
namespace {

using nlohmann::json;

// Stream tags for MixSeed.
constexpr uint64_t kSlotStream = 0x51;
constexpr uint64_t kPlaceStream = 0x9a;
constexpr uint64_t kMigrateStream = 0x3c;
constexpr uint64_t kTrainStream = 0x7e;
constexpr uint64_t kEvalStream = 0xe7;
constexpr uint64_t kDesignStream = 0xd5;

std::string IndividualId(int generation, int slot) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "g%02d-s%02d", generation, slot);
  return buf;
}

designer::ParentInfo AsParent(const Individual& x) {
  return {x.id, x.program, x.sigma, x.lambda, x.component_stats};
}

json OptionalToJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json RunSpecToJson(const RunSpec& s) {
  return {{"task", s.task},
          {"env", {{"layout", s.env.layout}, {"horizon", s.env.horizon}}},
          {"search", s.search},
          {"evolution", EvolutionConfigToJson(s.evolution)},
          {"trainer", trainer::TrainerConfigToJson(s.trainer)},
          {"include_statistics", s.include_statistics},
          {"design_retries", s.design_retries},
          {"max_resamples", s.max_resamples}};
}

void CheckSpec(const RunSpec& s) {
  if (s.task != "drive" && s.task != "strider" && s.task != "latch")
    throw ConfigError("unknown task: " + s.task);
  if (s.search != "revolve" && s.search != "greedy") throw ConfigError("unknown search: " + s.search);
  CheckConfig(s.evolution);
  trainer::Resolve(s.trainer, s.task);
  if (s.design_retries < 1) throw ConfigError("design_retries must be >= 1");
  if (s.max_resamples < 1) throw ConfigError("max_resamples must be >= 1");
}

RunSpec RunSpecFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("run spec must be an object");
  RunSpec s;
  static const char* kKnown[] = {"task",    "env",     "search",         "evolution",
                                 "trainer", "include_statistics", "design_retries", "max_resamples"};
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown))
      throw ConfigError("unknown run field: " + key);
  try {
    s.task = j.value("task", s.task);
    if (j.contains("env")) {
      s.env.layout = j["env"].value("layout", s.env.layout);
      s.env.horizon = j["env"].value("horizon", s.env.horizon);
    }
    s.search = j.value("search", s.search);
    if (j.contains("evolution")) s.evolution = EvolutionConfigFromJson(j["evolution"]);
    if (j.contains("trainer")) s.trainer = trainer::TrainerConfigFromJson(j["trainer"]);
    s.include_statistics = j.value("include_statistics", s.include_statistics);
    s.design_retries = j.value("design_retries", s.design_retries);
    s.max_resamples = j.value("max_resamples", s.max_resamples);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run spec: ") + e.what());
  }
  CheckSpec(s);
  return s;
}

json MetricsToJson(const GenerationMetrics& m) {
  json means = json::array();
  for (const auto& v : m.island_means) means.push_back(OptionalToJson(v));
  return {{"generation", m.generation},
          {"best_sigma", m.best_sigma},
          {"best_id", m.best_id},
          {"island_means", means},
          {"operators", m.operators},
          {"candidates", m.candidates},
          {"inserted", m.inserted},
          {"failed", m.failed},
          {"degenerate", m.degenerate},
          {"design_calls", m.design_calls},
          {"training_jobs", m.training_jobs},
          {"training_steps", m.training_steps}};
}

GenerationMetrics MetricsFromJson(const json& j) {
  GenerationMetrics m;
  m.generation = j.at("generation").get<int>();
  m.best_sigma = j.at("best_sigma").get<double>();
  m.best_id = j.at("best_id").get<std::string>();
  for (const auto& v : j.at("island_means"))
    m.island_means.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  m.operators = j.at("operators").get<std::map<std::string, int>>();
  m.candidates = j.at("candidates").get<int>();
  m.inserted = j.at("inserted").get<int>();
  m.failed = j.at("failed").get<int>();
  m.degenerate = j.at("degenerate").get<int>();
  m.design_calls = j.at("design_calls").get<int64_t>();
  m.training_jobs = j.at("training_jobs").get<int64_t>();
  m.training_steps = j.at("training_steps").get<int64_t>();
  return m;
}

json ResultToJson(const EvolutionResult& r) {
  json metrics = json::array();
  for (const auto& m : r.metrics) metrics.push_back(MetricsToJson(m));
  return {{"search", r.search},
          {"task", r.task},
          {"best", IndividualToJson(r.best)},
          {"best_trace", r.best_trace},
          {"metrics", metrics},
          {"design_calls", r.design_calls},
          {"training_jobs", r.training_jobs},
          {"training_steps", r.training_steps},
          {"terminated_early", r.terminated_early},
          {"database", DatabaseToJson(r.database)}};
}

Evolution::Evolution(RunSpec spec, Collaborators collaborators)
    : spec_(std::move(spec)), c_(collaborators) {
  CheckSpec(spec_);
  Init();
  db_.islands.assign(spec_.search == "greedy" ? 1 : static_cast<size_t>(spec_.evolution.islands), {});
}

Evolution::Evolution(const json& checkpoint, Collaborators collaborators) : c_(collaborators) {
  try {
    if (checkpoint.at("version").get<int>() != kCheckpointVersion)
      throw CheckpointError("unsupported checkpoint version");
    spec_ = RunSpecFromJson(checkpoint.at("spec"));
    db_ = DatabaseFromJson(checkpoint.at("database"));
    for (const auto& p : checkpoint.at("pending")) {
      SlotOutcome o;
      if (!p.at("individual").is_null()) o.individual = IndividualFromJson(p.at("individual"));
      o.design_calls = p.at("design_calls").get<int>();
      o.training_jobs = p.at("training_jobs").get<int>();
      o.training_steps = p.at("training_steps").get<int64_t>();
      o.op_count = p.at("op_count").get<std::string>();
      pending_[p.at("slot").get<int>()] = std::move(o);
    }
    for (const auto& m : checkpoint.at("metrics")) metrics_.push_back(MetricsFromJson(m));
    best_trace_ = checkpoint.at("best_trace").get<std::vector<double>>();
    design_calls_ = checkpoint.at("design_calls").get<int64_t>();
    training_jobs_ = checkpoint.at("training_jobs").get<int64_t>();
    training_steps_ = checkpoint.at("training_steps").get<int64_t>();
    finished_ = checkpoint.at("finished").get<bool>();
    terminated_early_ = checkpoint.at("terminated_early").get<bool>();
    if (!checkpoint.at("greedy_best").is_null())
      greedy_best_ = IndividualFromJson(checkpoint.at("greedy_best"));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad checkpoint: ") + e.what());
  }
  Init();
}

Evolution::~Evolution() = default;

void Evolution::Init() {
  if (!c_.backend || !c_.trainer || !c_.scorer) throw ConfigError("evolution needs a backend, trainer and scorer");
  spec_.trainer = trainer::Resolve(spec_.trainer, spec_.task);
  env_ = envs::MakeEnvironment(spec_.task, spec_.env);
}

json Evolution::Checkpoint() const {
  json pending = json::array();
  for (const auto& [slot, o] : pending_) {
    pending.push_back({{"slot", slot},
                       {"individual", o.individual ? IndividualToJson(*o.individual) : json(nullptr)},
                       {"design_calls", o.design_calls},
                       {"training_jobs", o.training_jobs},
                       {"training_steps", o.training_steps},
                       {"op_count", o.op_count}});
  }
  json metrics = json::array();
  for (const auto& m : metrics_) metrics.push_back(MetricsToJson(m));
  return {{"version", kCheckpointVersion},
          {"spec", RunSpecToJson(spec_)},
          {"database", DatabaseToJson(db_)},
          {"pending", pending},
          {"metrics", metrics},
          {"best_trace", best_trace_},
          {"design_calls", design_calls_},
          {"training_jobs", training_jobs_},
          {"training_steps", training_steps_},
          {"finished", finished_},
          {"terminated_early", terminated_early_},
          {"greedy_best", greedy_best_ ? IndividualToJson(*greedy_best_) : json(nullptr)}};
}

std::vector<uint64_t> Evolution::EvalSeeds() const {
  std::vector<uint64_t> seeds;
  for (int i = 0; i < spec_.trainer.eval_episodes; ++i)
    seeds.push_back(MixSeed({spec_.evolution.seed, kEvalStream, static_cast<uint64_t>(i)}));
  return seeds;
}

Evolution::SlotOutcome Evolution::RunSlot(int generation, int slot) const {
  const EvolutionConfig& cfg = spec_.evolution;
  const uint64_t seed = cfg.seed;
  const auto g = static_cast<uint64_t>(generation);
  const auto k = static_cast<uint64_t>(slot);
  Rng rng(MixSeed({seed, kSlotStream, g, k}));
  SlotOutcome out;

  for (int resample = 0; resample < spec_.max_resamples; ++resample) {
    designer::DesignRequest request;
    request.task = spec_.task;
    request.schema = env_->schema();
    request.include_statistics = spec_.include_statistics;
    request.retries = spec_.design_retries;
    request.nonce = MixSeed({seed, kDesignStream, g, k, static_cast<uint64_t>(resample)});

    Individual ind;
    ind.id = IndividualId(generation, slot);
    ind.generation = generation;
    if (generation == 1) {
      request.op = designer::Operator::kInit;
      Rng place(MixSeed({seed, kPlaceStream}));
      ind.island = spec_.search == "greedy"
                       ? 0
                       : InitialIslands(cfg.population, cfg.islands, place)[static_cast<size_t>(slot)];
      out.op_count = "init";
    } else {
      bool mutate = spec_.search == "greedy" || Bernoulli(rng, cfg.p_mutation);
      size_t island = spec_.search == "greedy" ? 0 : SampleIsland(db_, rng);
      const auto& members = db_.islands[island];
      ind.island = static_cast<int>(island);
      if (spec_.search == "greedy") {
        request.op = designer::Operator::kMutate;
        request.parents = {AsParent(members.front())};
        out.op_count = "mutate";
      } else if (!mutate && members.size() >= 2) {
        request.op = designer::Operator::kCrossover;
        for (size_t i : SampleMembers(members, 2, rng)) request.parents.push_back(AsParent(members[i]));
        out.op_count = "crossover";
      } else {
        request.op = designer::Operator::kMutate;
        request.parents = {AsParent(members[SampleMembers(members, 1, rng)[0]])};
        out.op_count = mutate ? "mutate" : "crossover_fallback";
      }
    }
    ind.op = std::string(designer::OperatorName(request.op));
    for (const auto& p : request.parents) ind.parents.push_back(p.id);

    ++out.design_calls;
    try {
      designer::DesignOutcome designed = designer::Design(*c_.backend, request);
      ind.program = std::move(designed.program);
    } catch (const designer::DesignerExhausted&) {
      continue;
    }
    ind.design_calls = out.design_calls;

    trainer::TrainerConfig tc = spec_.trainer;
    tc.seed = MixSeed({spec_.trainer.seed, seed, kTrainStream, g, k});
    ++out.training_jobs;
    try {
      trainer::TrainResult trained = c_.trainer->Train(ind.program, *env_, tc, ind.id);
      out.training_steps += trained.log.steps;
      ind.component_stats = fitness::ComputeComponentStatistics(trained.log);
      if (c_.sink) ind.policy_ref = c_.sink->SavePolicy(ind.id, *trained.policy);
      std::vector<envs::RolloutTrace> traces =
          trainer::Evaluate(*trained.policy, *env_, EvalSeeds(), &ind.program);
      for (size_t i = 0; i < traces.size(); ++i) {
        traces[i].id = ind.id + "-r" + std::to_string(i);
        ind.rollouts.push_back(traces[i].id);
        if (c_.sink) c_.sink->SaveTrace(traces[i]);
      }
      c_.scorer->ScoreOne(ind, traces);
    } catch (const trainer::DegenerateReward& e) {
      out.training_steps += e.steps();
      ind.degenerate = true;
      ind.sigma = c_.scorer->MinFitness();
      ind.lambda = "";
    }
    out.individual = std::move(ind);
    return out;
  }
  return out;
}

void Evolution::FinishGeneration(int generation, const RunHooks& hooks) {
  GenerationMetrics m;
  m.generation = generation;
  std::vector<Individual> fresh;
  for (auto& [slot, o] : pending_) {
    ++m.operators[o.op_count];
    if (o.individual) {
      fresh.push_back(*o.individual);
      m.degenerate += o.individual->degenerate;
    } else {
      ++m.failed;
    }
  }
  if (fresh.empty())
    throw designer::DesignerExhausted(spec_.design_retries,
                                      "every slot of generation " + std::to_string(generation) + " failed");
  m.candidates = static_cast<int>(fresh.size());
  c_.scorer->ScoreGeneration(fresh, db_);

  if (spec_.search == "greedy") {
    // The next base is the best of this generation's candidates, even when it
    // scores below the previous base; the best ever seen is kept separately.
    const Individual* pick = nullptr;
    for (const auto& f : fresh)
      if (!pick || BetterThan(f, *pick)) pick = &f;
    if (!greedy_best_ || BetterThan(*pick, *greedy_best_)) greedy_best_ = *pick;
    m.inserted = 1;
    db_.islands[0] = {*pick};
    db_.generation = generation;
  } else if (generation == 1) {
    for (const auto& f : fresh) db_.islands[static_cast<size_t>(f.island)].push_back(f);
    m.inserted = static_cast<int>(fresh.size());
    db_.generation = generation;
  } else {
    for (bool admitted : Select(fresh, db_)) m.inserted += admitted;
    if (db_.generation % spec_.evolution.migration_period == 0) {
      Rng rng(MixSeed({spec_.evolution.seed, kMigrateStream, static_cast<uint64_t>(generation)}));
      Migrate(db_, spec_.evolution, rng);
    }
  }
  pending_.clear();

  const Individual* best = spec_.search == "greedy" ? &*greedy_best_ : BestIndividual(db_);
  m.best_sigma = best->sigma;
  m.best_id = best->id;
  for (size_t i = 0; i < db_.islands.size(); ++i) m.island_means.push_back(db_.IslandMean(i));
  m.design_calls = design_calls_;
  m.training_jobs = training_jobs_;
  m.training_steps = training_steps_;
  metrics_.push_back(m);
  best_trace_.push_back(best->sigma);

  if (spec_.evolution.termination_fitness && best->sigma >= *spec_.evolution.termination_fitness) {
    terminated_early_ = generation < spec_.evolution.generations;
    finished_ = true;
  }
  if (generation >= spec_.evolution.generations) finished_ = true;
  if (hooks.on_checkpoint) hooks.on_checkpoint(Checkpoint());
  if (hooks.on_generation) hooks.on_generation(m);
}

EvolutionResult Evolution::Run(const RunHooks& hooks) {
  while (!finished_) {
    const int generation = db_.generation + 1;
    std::vector<int> todo;
    for (int slot = 0; slot < spec_.evolution.population; ++slot)
      if (!pending_.count(slot)) todo.push_back(slot);

    std::mutex mu;
    bool stop = false;
    ParallelFor(todo.size(), spec_.evolution.workers, [&](size_t i) {
      {
        std::lock_guard lock(mu);
        if (stop) return;
      }
      SlotOutcome o = RunSlot(generation, todo[i]);
      std::lock_guard lock(mu);
      design_calls_ += o.design_calls;
      training_jobs_ += o.training_jobs;
      training_steps_ += o.training_steps;
      pending_[todo[i]] = std::move(o);
      if (hooks.on_checkpoint) hooks.on_checkpoint(Checkpoint());
      if (hooks.interrupt && hooks.interrupt()) stop = true;
    });
    if (stop) throw Interrupted();
    FinishGeneration(generation, hooks);
  }
  return Result();
}

EvolutionResult Evolution::Result() const {
  EvolutionResult r;
  r.search = spec_.search;
  r.task = spec_.task;
  if (spec_.search == "greedy" && greedy_best_) r.best = *greedy_best_;
  else if (const Individual* best = BestIndividual(db_)) r.best = *best;
  r.best_trace = best_trace_;
  r.metrics = metrics_;
  r.design_calls = design_calls_;
  r.training_jobs = training_jobs_;
  r.training_steps = training_steps_;
  r.terminated_early = terminated_early_;
  r.database = db_;
  return r;
}

}  // namespace revo::evolution
