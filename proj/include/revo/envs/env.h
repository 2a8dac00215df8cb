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

#ifndef REVO_ENVS_ENV_H_
#define REVO_ENVS_ENV_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "revo/common/error.h"
#include "revo/dsl/schema.h"

namespace revo::envs {

struct StepEvents {
  bool collision = false;
  bool unhealthy = false;
  bool success = false;
};

class EpisodeEnded : public Error {
 public:
  EpisodeEnded() : Error("step called on a finished episode") {}
};

// Common contract of the three desk-scale tasks. Instances are single-threaded;
// Clone() gives each training job its own copy.
class Environment {
 public:
  virtual ~Environment() = default;

  // Task id: "drive", "strider" or "latch".
  virtual std::string task() const = 0;
  virtual std::string layout() const { return ""; }
  virtual const dsl::EnvSchema& schema() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;

  virtual void Reset(uint64_t seed) = 0;
  // Throws EpisodeEnded once done().
  virtual StepEvents Step(int action) = 0;
  virtual bool done() const = 0;
  virtual int steps() const = 0;

  // Current bindings for every schema variable, in schema order.
  virtual void Observe(dsl::StateVector& out) const = 0;

  // Tabular state index in [0, num_states()).
  virtual size_t DiscreteState() const = 0;
  virtual size_t num_states() const = 0;

  // Extra per-step values for replay (heading, obstacle geometry ids, ...).
  virtual std::map<std::string, double> RenderInfo() const { return {}; }

  virtual std::unique_ptr<Environment> Clone() const = 0;
};

struct EnvOptions {
  std::string layout = "default";  // DriveWorld only
  int horizon = 0;                 // 0 keeps the task default
};

// Throws ConfigError for an unknown task or layout.
std::unique_ptr<Environment> MakeEnvironment(const std::string& task,
                                             const EnvOptions& options = {});

// Schema of a task without building an environment.
const dsl::EnvSchema& TaskSchema(const std::string& task);

}  // namespace revo::envs

#endif  // REVO_ENVS_ENV_H_
