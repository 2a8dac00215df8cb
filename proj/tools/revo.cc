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

// revo: command-line front end for runs, benchmarks and the feedback API.
//
// Exit codes: 0 ok, 1 other failure, 2 config error, 3 checkpoint corrupt,
// 4 backend unreachable, 130 interrupted (checkpoint kept).

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "revo/designer/designer.h"
#include "revo/orchestrator/runner.h"
#include "revo/orchestrator/service.h"

namespace {

using namespace revo;
using namespace revo::orchestrator;

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

std::function<bool()> Interrupter(int after) {
  auto count = std::make_shared<int>(0);
  return [after, count] { return g_stop.load() || (after > 0 && ++*count >= after); };
}

void WriteOutput(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) throw Error("cannot write " + path);
}

void PrintResult(const RunOutcome& o) {
  std::cout << nlohmann::json{{"run_dir", o.run_dir},
                              {"best_id", o.result.best.id},
                              {"best_sigma", o.result.best.sigma},
                              {"best_trace", o.result.best_trace},
                              {"design_calls", o.result.design_calls},
                              {"training_steps", o.result.training_steps},
                              {"terminated_early", o.result.terminated_early}}
                   .dump(2)
            << "\n";
}

void ServeUntilSignal(const std::string& data_dir, const std::string& bind) {
  Service service;
  for (auto& h : LoadRunHandles(data_dir)) service.AddRun(h);
  auto [host, port] = ParseBind(bind);
  int bound = service.Start(host, port);
  std::cerr << "serving " << data_dir << " on " << host << ":" << bound << "\n";
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  service.Stop();
}

int Main(int argc, char** argv) {
  CLI::App app{"Evolutionary reward design: runs, benchmarks and the feedback service"};
  app.require_subcommand(1);

  std::string config_path, data_dir, run_id, bind, out;
  bool serve = false;
  int interrupt_after = 0;

  auto* run = app.add_subcommand("run", "Start a run from a RunConfig JSON file");
  run->add_option("--config", config_path, "RunConfig file")->required();
  run->add_option("--data-dir", data_dir, "Override data_dir");
  run->add_option("--run-id", run_id, "Override run_id");
  run->add_flag("--serve", serve, "Serve the HTTP API during an auto run");
  run->add_option("--interrupt-after", interrupt_after,
                  "Stop after this many finished pipelines (testing aid)");

  auto* resume = app.add_subcommand("resume", "Continue a run from its checkpoint");
  resume->add_option("--data-dir", data_dir, "Data directory")->required();
  resume->add_option("--run", run_id, "Run id")->required();
  resume->add_flag("--serve", serve, "Serve the HTTP API during an auto run");
  resume->add_option("--interrupt-after", interrupt_after,
                     "Stop after this many finished pipelines (testing aid)");

  BenchOptions bench_opts;
  std::string tasks = "latch,drive";
  auto* bench = app.add_subcommand("bench", "Compare revolve and greedy (auto mode, mock backend)");
  bench->add_option("--seeds", bench_opts.seeds, "Seeds per task")->check(CLI::PositiveNumber);
  bench->add_option("--first-seed", bench_opts.first_seed, "First seed");
  bench->add_option("--tasks", tasks, "Comma-separated tasks");
  bench->add_option("--generations", bench_opts.evolution.generations, "N");
  bench->add_option("--population", bench_opts.evolution.population, "K");
  bench->add_option("--islands", bench_opts.evolution.islands, "I");
  bench->add_option("--workers", bench_opts.evolution.workers, "Concurrent pipelines per run");
  bench->add_option("--budget", bench_opts.budget, "Training steps per individual (0: task default)");
  bench->add_option("--out", out, "Write the JSON table here instead of stdout");

  double k = fitness::kEloK;
  std::string history;
  auto* exp = app.add_subcommand("export", "Export the best reward, policy and rollouts of a run");
  exp->add_option("--data-dir", data_dir, "Data directory")->required();
  exp->add_option("--run", run_id, "Run id")->required();
  exp->add_option("--out", out, "Output directory")->required();

  auto* rate = app.add_subcommand("rate", "Replay a match-history file through Elo");
  rate->add_option("--history", history, "match_history.jsonl")->required();
  rate->add_option("--k", k, "Elo step size");

  auto* srv = app.add_subcommand("serve", "Serve the feedback API over stored runs");
  srv->add_option("--data-dir", data_dir, "Data directory")->required();
  srv->add_option("--bind", bind, "host:port")->default_val("127.0.0.1:8080");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);

  RunOptions options;
  options.interrupt = Interrupter(interrupt_after);
  options.serve = serve;
  options.log = &std::cerr;

  if (*run) {
    RunConfig config = LoadRunConfig(config_path);
    if (!data_dir.empty()) config.data_dir = data_dir;
    if (!run_id.empty()) config.run_id = run_id;
    PrintResult(StartRun(config, options));
    if (config.mode == "human" && config.feedback.final_ranking)
      ServeUntilSignal(config.data_dir, config.bind);
  } else if (*resume) {
    PrintResult(ResumeRun(data_dir, run_id, options));
  } else if (*bench) {
    bench_opts.tasks.clear();
    std::stringstream ss(tasks);
    for (std::string t; std::getline(ss, t, ',');)
      if (!t.empty()) bench_opts.tasks.push_back(t);
    evolution::CheckConfig(bench_opts.evolution);
    bench_opts.on_run = [](const nlohmann::json& row) { std::cerr << row.dump() << "\n"; };
    WriteOutput(out, RunBench(bench_opts));
  } else if (*exp) {
    std::cout << ExportRun(data_dir, run_id, out).dump(2) << "\n";
  } else if (*rate) {
    std::cout << RateHistory(history, k).dump(2) << "\n";
  } else if (*srv) {
    ServeUntilSignal(data_dir, bind);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const revo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const revo::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return 3;
  } catch (const revo::designer::TransportError& e) {
    std::cerr << "backend unreachable: " << e.what() << "\n";
    return 4;
  } catch (const revo::evolution::Interrupted& e) {
    std::cerr << "interrupted; resume with `revo resume`\n";
    return 130;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
