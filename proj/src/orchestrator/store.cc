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

#include "revo/orchestrator/store.h"

#include <fstream>
#include <sstream>

#include "revo/common/resources.h"

namespace revo::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

bool SafeName(const std::string& name) {
  if (name.empty() || name[0] == '.' || name.size() > 200) return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      return false;
  return true;
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

fs::path RunStore::RunDir(const std::string& data_dir, const std::string& run_id) {
  return fs::path(data_dir) / "runs" / run_id;
}

std::string RunStore::SavePolicy(const std::string& id, const trainer::Policy& policy) {
  std::string ref = "policies/" + id + ".qtb";
  WriteFileAtomic(root_ / ref, policy.Serialize());
  return ref;
}

void RunStore::SaveTrace(const envs::RolloutTrace& trace) {
  WriteFileAtomic(root_ / "rollouts" / (trace.id + ".json"), envs::TraceToJson(trace).dump());
}

std::optional<json> RunStore::LoadTraceJson(const std::string& trace_id) const {
  if (!SafeName(trace_id)) return std::nullopt;
  fs::path p = root_ / "rollouts" / (trace_id + ".json");
  if (!fs::exists(p)) return std::nullopt;
  json j = json::parse(ReadFile(p), nullptr, false);
  if (j.is_discarded()) throw CheckpointError("corrupt trace " + p.string());
  return j;
}

std::optional<std::string> RunStore::LoadPolicyBytes(const std::string& policy_ref) const {
  if (policy_ref.rfind("policies/", 0) != 0 || !SafeName(policy_ref.substr(9))) return std::nullopt;
  fs::path p = root_ / policy_ref;
  if (!fs::exists(p)) return std::nullopt;
  return ReadFile(p);
}

void RunStore::SaveJson(const std::string& name, const json& j) const {
  WriteFileAtomic(root_ / name, j.dump() + "\n");
}

std::optional<json> RunStore::LoadJson(const std::string& name) const {
  fs::path p = root_ / name;
  if (!fs::exists(p)) return std::nullopt;
  json j = json::parse(ReadFile(p), nullptr, false);
  if (j.is_discarded()) throw CheckpointError("corrupt " + p.string());
  return j;
}

void RunStore::WriteMetrics(const json& metrics_array) const {
  std::string text;
  for (const auto& m : metrics_array) text += m.dump() + "\n";
  WriteFileAtomic(root_ / "metrics.jsonl", text);
}

std::vector<json> RunStore::LoadMetrics() const {
  std::vector<json> out;
  fs::path p = root_ / "metrics.jsonl";
  if (!fs::exists(p)) return out;
  std::istringstream in(ReadFile(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw CheckpointError("corrupt " + p.string());
    out.push_back(std::move(j));
  }
  return out;
}

void RunStore::AppendPreference(const fitness::PreferenceRecord& record) {
  std::lock_guard lock(append_mu_);
  std::ofstream out(root_ / "match_history.jsonl", std::ios::app | std::ios::binary);
  out << fitness::RecordToJson(record).dump() << '\n';
  out.flush();
  if (!out) throw Error("cannot append to match history in " + root_.string());
}

std::vector<fitness::PreferenceRecord> RunStore::LoadMatchHistory() const {
  fs::path p = root_ / "match_history.jsonl";
  if (!fs::exists(p)) return {};
  return ParseMatchHistory(ReadFile(p));
}

std::vector<fitness::PreferenceRecord> ParseMatchHistory(const std::string& text) {
  std::vector<fitness::PreferenceRecord> out;
  size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    bool torn = end == std::string::npos;
    std::string line = text.substr(pos, torn ? std::string::npos : end - pos);
    pos = torn ? text.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (torn) break;
      throw CheckpointError("match history line " + std::to_string(line_no) + " is not JSON");
    }
    try {
      out.push_back(fitness::RecordFromJson(j));
    } catch (const Error& e) {
      throw CheckpointError("match history line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace revo::orchestrator
