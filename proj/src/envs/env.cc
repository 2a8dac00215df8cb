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

#include "revo/envs/env.h"

#include "revo/envs/drive_world.h"
#include "revo/envs/latch_world.h"
#include "revo/envs/strider_world.h"

namespace revo::envs {

std::unique_ptr<Environment> MakeEnvironment(const std::string& task, const EnvOptions& options) {
  if (task == "drive") {
    return std::make_unique<DriveWorld>(LoadDriveLayout(options.layout),
                                        options.horizon ? options.horizon
                                                        : DriveWorld::kDefaultHorizon);
  }
  if (task == "strider") {
    return std::make_unique<StriderWorld>(options.horizon ? options.horizon
                                                          : StriderWorld::kDefaultHorizon);
  }
  if (task == "latch") {
    return std::make_unique<LatchWorld>(options.horizon ? options.horizon
                                                        : LatchWorld::kDefaultHorizon);
  }
  throw ConfigError("unknown task '" + task + "'");
}

const dsl::EnvSchema& TaskSchema(const std::string& task) {
  if (task == "drive") return DriveSchema();
  if (task == "strider") return StriderSchema();
  if (task == "latch") return LatchSchema();
  throw ConfigError("unknown task '" + task + "'");
}

}  // namespace revo::envs
