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

#ifndef REVO_ORCHESTRATOR_STORE_H_
#define REVO_ORCHESTRATOR_STORE_H_

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revo/envs/trace.h"
#include "revo/evolution/scorer.h"
#include "revo/fitness/elo.h"

namespace revo::orchestrator {

// File-backed store for one run:
//   config.json, checkpoint.json, result.json  (rewritten atomically)
//   metrics.jsonl                              (one GenerationMetrics per line)
//   match_history.jsonl                        (append-only PreferenceRecords)
//   policies/<individual>.qtb, rollouts/<trace>.json
class RunStore : public evolution::ArtifactSink {
 public:
  explicit RunStore(std::filesystem::path root);

  static std::filesystem::path RunDir(const std::string& data_dir, const std::string& run_id);

  const std::filesystem::path& root() const { return root_; }

  std::string SavePolicy(const std::string& id, const trainer::Policy& policy) override;
  void SaveTrace(const envs::RolloutTrace& trace) override;

  // Empty for unknown or unsafe ids.
  std::optional<nlohmann::json> LoadTraceJson(const std::string& trace_id) const;
  std::optional<std::string> LoadPolicyBytes(const std::string& policy_ref) const;

  void SaveJson(const std::string& name, const nlohmann::json& j) const;
  // Throws CheckpointError when present but unreadable; nullopt when absent.
  std::optional<nlohmann::json> LoadJson(const std::string& name) const;

  void SaveCheckpoint(const nlohmann::json& j) const { SaveJson("checkpoint.json", j); }
  std::optional<nlohmann::json> LoadCheckpoint() const { return LoadJson("checkpoint.json"); }

  void WriteMetrics(const nlohmann::json& metrics_array) const;
  std::vector<nlohmann::json> LoadMetrics() const;

  void AppendPreference(const fitness::PreferenceRecord& record);
  // A torn final line (crash mid-append) is dropped; damage elsewhere throws
  // CheckpointError.
  std::vector<fitness::PreferenceRecord> LoadMatchHistory() const;

 private:
  std::filesystem::path root_;
  std::mutex append_mu_;
};

// Letters, digits, '-', '_' and '.', not starting with '.'.
bool SafeName(const std::string& name);

// Parses JSON-lines text; throws CheckpointError naming the bad line.
std::vector<fitness::PreferenceRecord> ParseMatchHistory(const std::string& text);

}  // namespace revo::orchestrator

#endif  // REVO_ORCHESTRATOR_STORE_H_
