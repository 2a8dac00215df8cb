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

#include "revo/trainer/trainer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "revo/common/random.h"
#include "revo/dsl/evaluate.h"
#include "revo/dsl/schema.h"

namespace revo::trainer {
namespace {

constexpr std::string_view kPolicyMagic = "REVOQTB1";

std::string FormatFraction(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * f);
  return buf;
}

}  // namespace

int64_t DefaultBudget(std::string_view task) {
  if (task == "drive") return 200000;
  if (task == "strider") return 100000;
  if (task == "latch") return 50000;
  throw ConfigError("unknown task: " + std::string(task));
}

TrainerConfig DefaultTrainerConfig(std::string_view task) {
  TrainerConfig c;
  c.budget = DefaultBudget(task);
  c.algorithm = task == "strider" ? "discretized-q" : "tabular-q";
  return c;
}

TrainerConfig Resolve(const TrainerConfig& config, std::string_view task) {
  TrainerConfig c = config;
  if (c.budget == 0) c.budget = DefaultBudget(task);
  if (c.checkpoint_every == 0) c.checkpoint_every = std::max<int64_t>(1, c.budget / 10);
  if (c.algorithm != "tabular-q" && c.algorithm != "discretized-q")
    throw ConfigError("unknown trainer algorithm: " + c.algorithm);
  if (c.budget <= 0) throw ConfigError("trainer budget must be positive");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ConfigError("trainer gamma must be in (0, 1]");
  if (!(c.learning_rate > 0.0 && c.learning_rate <= 1.0))
    throw ConfigError("trainer learning_rate must be in (0, 1]");
  if (!(c.epsilon_start >= 0.0 && c.epsilon_start <= 1.0 && c.epsilon_end >= 0.0 &&
        c.epsilon_end <= c.epsilon_start))
    throw ConfigError("trainer epsilon schedule must satisfy 0 <= end <= start <= 1");
  if (!(c.epsilon_decay >= 0.0 && c.epsilon_decay <= 1.0))
    throw ConfigError("trainer epsilon_decay must be in [0, 1]");
  if (c.eval_episodes < 0) throw ConfigError("trainer eval_episodes must be >= 0");
  if (c.checkpoint_every < 0) throw ConfigError("trainer checkpoint_every must be >= 0");
  if (!(c.shadow_fraction >= 0.0 && c.shadow_fraction <= 1.0))
    throw ConfigError("trainer shadow_fraction must be in [0, 1]");
  if (c.workers < 1) throw ConfigError("trainer workers must be >= 1");
  return c;
}

nlohmann::json TrainerConfigToJson(const TrainerConfig& c) {
  return {{"algorithm", c.algorithm},
          {"budget", c.budget},
          {"learning_rate", c.learning_rate},
          {"gamma", c.gamma},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"epsilon_decay", c.epsilon_decay},
          {"eval_episodes", c.eval_episodes},
          {"checkpoint_every", c.checkpoint_every},
          {"shadow_fraction", c.shadow_fraction},
          {"workers", c.workers},
          {"seed", c.seed}};
}

TrainerConfig TrainerConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("trainer config must be an object");
  static const char* kKnown[] = {"algorithm",     "budget",        "learning_rate",
                                 "gamma",         "epsilon_start", "epsilon_end",
                                 "epsilon_decay", "eval_episodes", "checkpoint_every",
                                 "shadow_fraction", "workers",     "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return key == k; }) == std::end(kKnown))
      throw ConfigError("unknown trainer field: " + key);
  }
  TrainerConfig c;
  try {
    c.algorithm = j.value("algorithm", c.algorithm);
    c.budget = j.value("budget", c.budget);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.gamma = j.value("gamma", c.gamma);
    c.epsilon_start = j.value("epsilon_start", c.epsilon_start);
    c.epsilon_end = j.value("epsilon_end", c.epsilon_end);
    c.epsilon_decay = j.value("epsilon_decay", c.epsilon_decay);
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.shadow_fraction = j.value("shadow_fraction", c.shadow_fraction);
    c.workers = j.value("workers", c.workers);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("trainer config: ") + e.what());
  }
  return c;
}

double Epsilon(const TrainerConfig& c, int64_t step) {
  double window = c.epsilon_decay * static_cast<double>(c.budget);
  double s = static_cast<double>(step);
  if (window <= 0.0 || s >= window) return c.epsilon_end;
  return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * (s / window);
}

DegenerateReward::DegenerateReward(int64_t degenerate, int64_t evaluations)
    : Error("degenerate reward: " + std::to_string(degenerate) + " of " +
            std::to_string(evaluations) + " evaluations (" +
            FormatFraction(evaluations ? static_cast<double>(degenerate) /
                                             static_cast<double>(evaluations)
                                       : 0.0) +
            ")"),
      fraction_(evaluations ? static_cast<double>(degenerate) / static_cast<double>(evaluations)
                            : 0.0),
      steps_(evaluations) {}

TabularPolicy::TabularPolicy(size_t num_states, int num_actions, PolicyMetadata metadata)
    : num_states_(num_states),
      num_actions_(num_actions),
      metadata_(std::move(metadata)),
      q_(num_states * static_cast<size_t>(num_actions), 0.0) {
  if (num_actions <= 0) throw Error("policy needs at least one action");
}

int TabularPolicy::Greedy(size_t state) const {
  const double* row = &q_[state * num_actions_];
  int best = 0;
  for (int a = 1; a < num_actions_; ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

double TabularPolicy::MaxValue(size_t state) const {
  const double* row = &q_[state * num_actions_];
  return *std::max_element(row, row + num_actions_);
}

int TabularPolicy::Act(const envs::Environment& env) const { return Greedy(env.DiscreteState()); }

std::string TabularPolicy::Serialize() const {
  nlohmann::json header = {{"version", 1},
                           {"states", num_states_},
                           {"actions", num_actions_},
                           {"program_id", metadata_.program_id},
                           {"env_id", metadata_.env_id},
                           {"seed", metadata_.seed}};
  std::string out(kPolicyMagic);
  out += header.dump();
  out += '\n';
  size_t offset = out.size();
  out.resize(offset + q_.size() * 8);
  for (size_t i = 0; i < q_.size(); ++i) {
    uint64_t bits = std::bit_cast<uint64_t>(q_[i]);
    for (int b = 0; b < 8; ++b) out[offset + i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return out;
}

std::unique_ptr<TabularPolicy> TabularPolicy::Deserialize(std::string_view bytes) {
  if (bytes.substr(0, kPolicyMagic.size()) != kPolicyMagic)
    throw CheckpointError("not a tabular policy");
  size_t nl = bytes.find('\n', kPolicyMagic.size());
  if (nl == std::string_view::npos) throw CheckpointError("truncated policy header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kPolicyMagic.size(), nl - kPolicyMagic.size()));
    if (header.at("version").get<int>() != 1) throw CheckpointError("unsupported policy version");
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad policy header: ") + e.what());
  }
  PolicyMetadata meta{header.value("program_id", ""), header.value("env_id", ""),
                      header.value("seed", uint64_t{0})};
  auto policy = std::make_unique<TabularPolicy>(header.at("states").get<size_t>(),
                                                header.at("actions").get<int>(), meta);
  std::string_view body = bytes.substr(nl + 1);
  if (body.size() != policy->q_.size() * 8) throw CheckpointError("policy table size mismatch");
  for (size_t i = 0; i < policy->q_.size(); ++i) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<uint64_t>(static_cast<unsigned char>(body[i * 8 + b])) << (8 * b);
    policy->q_[i] = std::bit_cast<double>(bits);
  }
  return policy;
}

std::unique_ptr<Policy> LoadPolicy(std::string_view bytes) {
  return TabularPolicy::Deserialize(bytes);
}

TrainResult QLearningTrainer::Train(const dsl::RewardProgram& program,
                                    const envs::Environment& prototype,
                                    const TrainerConfig& raw_config,
                                    const std::string& program_id) const {
  const TrainerConfig config = Resolve(raw_config, prototype.task());
  dsl::CompiledProgram compiled(program, prototype.schema());
  std::unique_ptr<envs::Environment> env = prototype.Clone();
  const dsl::EnvSchema& schema = env->schema();

  std::string env_id = env->task();
  if (!env->layout().empty()) env_id += "/" + env->layout();
  auto policy = std::make_shared<TabularPolicy>(env->num_states(), env->num_actions(),
                                                PolicyMetadata{program_id, env_id, config.seed});

  // Separate streams so the shadow sampling never perturbs exploration.
  Rng explore(MixSeed({config.seed, 1}));
  Rng episodes(MixSeed({config.seed, 2}));
  Rng shadow(MixSeed({config.seed, 3}));

  const std::vector<std::string>& names = compiled.component_names();
  fitness::TrainingLog log;
  fitness::CheckpointRecord window;
  for (const auto& n : names) window.components[n];
  std::vector<fitness::Accumulator*> slots;
  for (const auto& n : names) slots.push_back(&window.components[n]);

  dsl::StateVector sv(schema.size());
  std::vector<double> components(names.size());

  env->Reset(episodes());
  size_t s = env->DiscreteState();
  const int num_actions = env->num_actions();
  for (int64_t step = 0; step < config.budget; ++step) {
    int a = Bernoulli(explore, Epsilon(config, step))
                ? static_cast<int>(UniformIndex(explore, static_cast<uint64_t>(num_actions)))
                : policy->Greedy(s);
    envs::StepEvents events = env->Step(a);
    env->Observe(sv);

    double r = 0.0;
    bool degenerate = false;
    try {
      r = compiled.Run(sv, components, degenerate);
    } catch (const dsl::NonFiniteResult&) {
      degenerate = true;
      r = 0.0;
      std::fill(components.begin(), components.end(), 0.0);
    }
    ++log.evaluations;
    if (degenerate) ++log.degenerate;
    for (size_t i = 0; i < slots.size(); ++i) slots[i]->Add(components[i]);
    window.total.Add(r);

    if (Bernoulli(shadow, config.shadow_fraction)) {
      bool reference_failed = false;
      dsl::RewardOutput reference;
      try {
        reference = dsl::Evaluate(program, dsl::ToState(schema, sv));
      } catch (const dsl::NonFiniteResult&) {
        reference_failed = true;
      }
      bool agree = reference_failed ? (degenerate && r == 0.0)
                                    : std::bit_cast<uint64_t>(reference.total) ==
                                          std::bit_cast<uint64_t>(r);
      if (!agree) throw Error("shadow evaluation disagrees with the training reward");
    }

    size_t next = env->DiscreteState();
    bool terminal = events.collision || events.unhealthy || events.success;
    double target = r + (terminal ? 0.0 : config.gamma * policy->MaxValue(next));
    double& q = policy->Q(s, a);
    q += config.learning_rate * (target - q);
    s = next;

    if (env->done()) {
      log.episode_lengths.push_back(env->steps());
      env->Reset(episodes());
      s = env->DiscreteState();
    }
    ++log.steps;
    if (log.steps % config.checkpoint_every == 0 || log.steps == config.budget) {
      window.step = log.steps;
      log.checkpoints.push_back(window);
      for (auto& [_, acc] : window.components) acc = fitness::Accumulator{};
      window.total = fitness::Accumulator{};
      if (2 * log.degenerate > log.evaluations) throw DegenerateReward(log.degenerate, log.evaluations);
    }
  }
  return {policy, std::move(log)};
}

std::vector<envs::RolloutTrace> Evaluate(const Policy& policy, const envs::Environment& prototype,
                                         const std::vector<uint64_t>& seeds,
                                         const dsl::RewardProgram* program) {
  std::unique_ptr<envs::Environment> env = prototype.Clone();
  std::optional<dsl::CompiledProgram> compiled;
  if (program) compiled.emplace(*program, env->schema());
  std::vector<envs::RolloutTrace> traces;
  traces.reserve(seeds.size());
  envs::ActionChooser choose = [&](const envs::Environment& e) { return policy.Act(e); };
  for (uint64_t seed : seeds)
    traces.push_back(envs::RecordRollout(*env, seed, choose, compiled ? &*compiled : nullptr));
  return traces;
}

std::vector<envs::RolloutTrace> EvaluateRandom(const envs::Environment& prototype,
                                               const std::vector<uint64_t>& seeds,
                                               uint64_t action_seed) {
  std::unique_ptr<envs::Environment> env = prototype.Clone();
  Rng rng(action_seed);
  envs::ActionChooser choose = [&](const envs::Environment& e) {
    return static_cast<int>(UniformIndex(rng, static_cast<uint64_t>(e.num_actions())));
  };
  std::vector<envs::RolloutTrace> traces;
  for (uint64_t seed : seeds) traces.push_back(envs::RecordRollout(*env, seed, choose));
  return traces;
}

}  // namespace revo::trainer
