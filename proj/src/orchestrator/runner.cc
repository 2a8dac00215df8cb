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

#include "revo/orchestrator/runner.h"

#include <algorithm>
#include <filesystem>
#include <ostream>

#include "revo/common/resources.h"
#include "revo/dsl/parser.h"
#include "revo/evolution/scorer.h"
#include "revo/trainer/trainer.h"

namespace revo::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunOutcome Execute(std::shared_ptr<RunHandle> handle, const json* checkpoint,
                   const RunOptions& options) {
  const RunConfig& config = handle->config();
  std::unique_ptr<designer::Backend> backend = MakeBackend(config.backend);
  trainer::QLearningTrainer trainer;
  std::unique_ptr<evolution::Scorer> scorer;
  if (config.mode == "human")
    scorer = std::make_unique<HumanScorer>(handle->hub(), options.interrupt);
  else
    scorer = std::make_unique<evolution::AutoScorer>(config.spec.task);
  evolution::Collaborators collab{backend.get(), &trainer, scorer.get(), &handle->store()};

  std::unique_ptr<evolution::Evolution> evo =
      checkpoint ? std::make_unique<evolution::Evolution>(*checkpoint, collab)
                 : std::make_unique<evolution::Evolution>(config.spec, collab);

  Service service;
  if (options.serve || config.mode == "human") {
    service.AddRun(handle);
    auto [host, port] = ParseBind(config.bind);
    int bound = service.Start(host, port);
    if (options.log) *options.log << "serving on " << host << ":" << bound << "\n";
    if (options.on_listening) options.on_listening(bound);
  }

  size_t metrics_written = static_cast<size_t>(-1);
  auto save = [&](const json& j) {
    handle->store().SaveCheckpoint(j);
    if (j.at("metrics").size() != metrics_written) {
      handle->store().WriteMetrics(j.at("metrics"));
      metrics_written = j.at("metrics").size();
    }
    handle->Observe(j);
  };
  save(evo->Checkpoint());

  evolution::RunHooks hooks;
  hooks.interrupt = options.interrupt;
  hooks.on_checkpoint = save;
  hooks.on_generation = [&](const evolution::GenerationMetrics& m) {
    if (options.log)
      *options.log << "generation " << m.generation << ": best " << m.best_sigma << " ("
                   << m.best_id << "), inserted " << m.inserted << "/" << m.candidates << "\n";
  };

  handle->SetState("running");
  try {
    evolution::EvolutionResult result = evo->Run(hooks);
    handle->store().SaveJson("result.json", evolution::ResultToJson(result));
    handle->SetState("finished");
    return {std::move(result), handle->store().root().string()};
  } catch (const evolution::Interrupted&) {
    handle->SetState("stopped");
    throw;
  } catch (const std::exception& e) {
    handle->SetState("failed", e.what());
    throw;
  }
}

}  // namespace

RunOutcome StartRun(const RunConfig& config, const RunOptions& options) {
  CheckRunConfig(config);
  fs::path dir = RunStore::RunDir(config.data_dir, config.run_id);
  if (fs::exists(dir / "checkpoint.json"))
    throw ConfigError("run " + config.run_id + " already exists in " + config.data_dir +
                      "; resume it or pick another run_id");
  auto handle = std::make_shared<RunHandle>(config);
  handle->store().SaveJson("config.json", RunConfigToJson(config));
  return Execute(handle, nullptr, options);
}

RunOutcome ResumeRun(const std::string& data_dir, const std::string& run_id,
                     const RunOptions& options) {
  fs::path dir = RunStore::RunDir(data_dir, run_id);
  if (!fs::exists(dir / "config.json")) throw CheckpointError("no run " + run_id + " in " + data_dir);
  json raw = json::parse(ReadFile(dir / "config.json"), nullptr, false);
  if (raw.is_discarded()) throw CheckpointError("corrupt " + (dir / "config.json").string());
  RunConfig config;
  try {
    config = RunConfigFromJson(raw);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("stored config: ") + e.what());
  }
  config.data_dir = data_dir;
  auto handle = std::make_shared<RunHandle>(config);
  auto checkpoint = handle->store().LoadCheckpoint();
  if (!checkpoint) throw CheckpointError("run " + run_id + " has no checkpoint");
  return Execute(handle, &*checkpoint, options);
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

json RunBench(const BenchOptions& options) {
  json runs = json::array();
  json summary = json::object();
  json plot = json::object();
  for (const auto& task : options.tasks) {
    std::map<std::string, std::vector<double>> finals;
    std::map<std::string, std::vector<std::vector<double>>> traces;
    bool monotone = true;
    bool budgets_equal = true;
    for (int s = 0; s < options.seeds; ++s) {
      uint64_t seed = options.first_seed + static_cast<uint64_t>(s);
      std::map<std::string, json> pair;
      for (const char* search : {"revolve", "greedy"}) {
        evolution::RunSpec spec;
        spec.task = task;
        spec.search = search;
        spec.evolution = options.evolution;
        spec.evolution.seed = seed;
        spec.trainer.budget = options.budget;
        designer::MockBackend backend(designer::MockOptions{seed, 0.0});
        trainer::QLearningTrainer trainer;
        evolution::AutoScorer scorer(task);
        evolution::EvolutionResult r =
            evolution::Evolution(spec, {&backend, &trainer, &scorer, nullptr}).Run();
        json row = {{"task", task},
                    {"seed", seed},
                    {"search", search},
                    {"best_sigma", r.best.sigma},
                    {"best_id", r.best.id},
                    {"best_trace", r.best_trace},
                    {"design_calls", r.design_calls},
                    {"training_jobs", r.training_jobs},
                    {"training_steps", r.training_steps}};
        monotone = monotone && std::is_sorted(r.best_trace.begin(), r.best_trace.end());
        finals[search].push_back(r.best.sigma);
        traces[search].push_back(r.best_trace);
        pair[search] = row;
        runs.push_back(row);
        if (options.on_run) options.on_run(row);
      }
      for (const char* key : {"design_calls", "training_jobs", "training_steps"})
        budgets_equal = budgets_equal && pair["revolve"][key] == pair["greedy"][key];
    }
    double med_r = Median(finals["revolve"]);
    double med_g = Median(finals["greedy"]);
    summary[task] = {{"median_revolve", med_r},
                     {"median_greedy", med_g},
                     {"revolve_at_least_greedy", med_r >= med_g},
                     {"traces_non_decreasing", monotone},
                     {"budgets_equal", budgets_equal}};
    json task_plot = json::object();
    for (const auto& [search, per_seed] : traces) {
      json curve = json::array();
      size_t gens = 0;
      for (const auto& t : per_seed) gens = std::max(gens, t.size());
      for (size_t g = 0; g < gens; ++g) {
        std::vector<double> at;
        for (const auto& t : per_seed)
          if (!t.empty()) at.push_back(t[std::min(g, t.size() - 1)]);
        curve.push_back({{"generation", g + 1},
                         {"median", Median(at)},
                         {"min", *std::min_element(at.begin(), at.end())},
                         {"max", *std::max_element(at.begin(), at.end())}});
      }
      task_plot[search] = curve;
    }
    plot[task] = task_plot;
  }
  return {{"config",
           {{"tasks", options.tasks},
            {"seeds", options.seeds},
            {"first_seed", options.first_seed},
            {"evolution", evolution::EvolutionConfigToJson(options.evolution)},
            {"budget", options.budget}}},
          {"runs", runs},
          {"summary", summary},
          {"plot", plot}};
}

json ExportRun(const std::string& data_dir, const std::string& run_id, const std::string& out_dir) {
  RunStore store(RunStore::RunDir(data_dir, run_id));
  auto result = store.LoadJson("result.json");
  if (!result) throw CheckpointError("run " + run_id + " has no result; finish or resume it first");
  evolution::Individual best;
  try {
    best = evolution::IndividualFromJson(result->at("best"));
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("result.json: ") + e.what());
  }
  fs::path out(out_dir);
  fs::create_directories(out / "rollouts");
  json manifest = {{"run_id", run_id}, {"best_id", best.id}, {"sigma", best.sigma}};
  WriteFileAtomic(out / "best.dsl", dsl::Render(best.program));
  WriteFileAtomic(out / "best.json", evolution::IndividualToJson(best).dump(2) + "\n");
  if (auto bytes = store.LoadPolicyBytes(best.policy_ref)) {
    WriteFileAtomic(out / "best.qtb", *bytes);
    manifest["policy"] = "best.qtb";
  }
  json rollouts = json::array();
  for (const auto& id : best.rollouts) {
    if (auto trace = store.LoadTraceJson(id)) {
      WriteFileAtomic(out / "rollouts" / (id + ".json"), trace->dump());
      rollouts.push_back("rollouts/" + id + ".json");
    }
  }
  manifest["rollouts"] = rollouts;
  std::string metrics;
  for (const auto& m : store.LoadMetrics()) metrics += m.dump() + "\n";
  WriteFileAtomic(out / "metrics.jsonl", metrics);
  WriteFileAtomic(out / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

json RateHistory(const std::string& path, double k) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  auto history = ParseMatchHistory(text);
  return {{"matches", history.size()}, {"k", k}, {"ratings", fitness::RerateAll(history, {}, k)}};
}

}  // namespace revo::orchestrator
