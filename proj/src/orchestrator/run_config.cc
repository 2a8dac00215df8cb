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

#include "revo/orchestrator/run_config.h"

#include <algorithm>
#include <set>

#include "revo/common/resources.h"

namespace revo::orchestrator {

using nlohmann::json;

namespace {

void RejectUnknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown " + where + " field: " + key);
}

const std::set<std::string> kSpecFields = {"task",    "env",     "search",         "evolution",
                                           "trainer", "include_statistics", "design_retries",
                                           "max_resamples"};

BackendConfig BackendFromJson(const json& j) {
  RejectUnknown(j, {"kind", "seed", "malformed_rate", "llm"}, "backend");
  BackendConfig b;
  b.kind = j.value("kind", b.kind);
  b.mock.seed = j.value("seed", b.mock.seed);
  b.mock.malformed_rate = j.value("malformed_rate", b.mock.malformed_rate);
  if (j.contains("llm")) b.llm = designer::LlmConfigFromJson(j["llm"]);
  return b;
}

FeedbackConfig FeedbackFromJson(const json& j) {
  RejectUnknown(j, {"quorum", "cross_generation", "ticket_ttl_seconds", "allow_self_pairs",
                    "final_ranking"},
                "feedback");
  FeedbackConfig f;
  f.quorum = j.value("quorum", f.quorum);
  f.cross_generation = j.value("cross_generation", f.cross_generation);
  f.ticket_ttl_seconds = j.value("ticket_ttl_seconds", f.ticket_ttl_seconds);
  f.allow_self_pairs = j.value("allow_self_pairs", f.allow_self_pairs);
  f.final_ranking = j.value("final_ranking", f.final_ranking);
  return f;
}

}  // namespace

void CheckRunConfig(const RunConfig& c) {
  if (c.mode != "auto" && c.mode != "human") throw ConfigError("mode must be auto or human");
  if (c.backend.kind != "mock" && c.backend.kind != "llm")
    throw ConfigError("backend.kind must be mock or llm");
  if (!(c.backend.mock.malformed_rate >= 0.0 && c.backend.mock.malformed_rate < 1.0))
    throw ConfigError("backend.malformed_rate must be in [0, 1)");
  if (c.feedback.quorum < 1) throw ConfigError("feedback.quorum must be >= 1");
  if (!(c.feedback.cross_generation >= 0.0 && c.feedback.cross_generation <= 1.0))
    throw ConfigError("feedback.cross_generation must be in [0, 1]");
  if (!(c.feedback.ticket_ttl_seconds > 0.0))
    throw ConfigError("feedback.ticket_ttl_seconds must be > 0");
  if (c.data_dir.empty()) throw ConfigError("data_dir must not be empty");
  if (c.run_id.find_first_of("/\\ ") != std::string::npos || c.run_id == "." || c.run_id == "..")
    throw ConfigError("run_id must be a plain name");
  ParseBind(c.bind);
  evolution::CheckSpec(c.spec);
}

RunConfig RunConfigFromJson(const json& j) {
  std::set<std::string> known = kSpecFields;
  known.insert({"run_id", "mode", "backend", "feedback", "data_dir", "bind"});
  RejectUnknown(j, known, "run config");
  RunConfig c;
  try {
    json spec = json::object();
    for (const auto& f : kSpecFields)
      if (j.contains(f)) spec[f] = j[f];
    c.spec = evolution::RunSpecFromJson(spec);
    c.run_id = j.value("run_id", c.run_id);
    c.mode = j.value("mode", c.mode);
    if (j.contains("backend")) c.backend = BackendFromJson(j["backend"]);
    if (j.contains("feedback")) c.feedback = FeedbackFromJson(j["feedback"]);
    c.data_dir = j.value("data_dir", c.data_dir);
    c.bind = j.value("bind", c.bind);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  if (c.run_id.empty()) c.run_id = DefaultRunId(c);
  CheckRunConfig(c);
  return c;
}

json RunConfigToJson(const RunConfig& c) {
  json j = evolution::RunSpecToJson(c.spec);
  j["run_id"] = c.run_id;
  j["mode"] = c.mode;
  j["backend"] = {{"kind", c.backend.kind},
                  {"seed", c.backend.mock.seed},
                  {"malformed_rate", c.backend.mock.malformed_rate},
                  {"llm", designer::LlmConfigToJson(c.backend.llm)}};
  j["feedback"] = {{"quorum", c.feedback.quorum},
                   {"cross_generation", c.feedback.cross_generation},
                   {"ticket_ttl_seconds", c.feedback.ticket_ttl_seconds},
                   {"allow_self_pairs", c.feedback.allow_self_pairs},
                   {"final_ranking", c.feedback.final_ranking}};
  j["data_dir"] = c.data_dir;
  j["bind"] = c.bind;
  return j;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path + ": not valid JSON");
  return RunConfigFromJson(j);
}

std::string DefaultRunId(const RunConfig& c) {
  return c.spec.task + "-" + c.spec.search + "-" + c.mode + "-s" +
         std::to_string(c.spec.evolution.seed);
}

std::unique_ptr<designer::Backend> MakeBackend(const BackendConfig& config) {
  if (config.kind == "mock") return std::make_unique<designer::MockBackend>(config.mock);
  if (config.kind == "llm") return std::make_unique<designer::LlmBackend>(config.llm);
  throw ConfigError("unknown backend: " + config.kind);
}

std::pair<std::string, int> ParseBind(const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("bind must be host:port");
  std::string host = bind.substr(0, colon);
  std::string port = bind.substr(colon + 1);
  if (port.empty() || !std::all_of(port.begin(), port.end(), ::isdigit) || port.size() > 5)
    throw ConfigError("bind port must be a number");
  int p = std::stoi(port);
  if (p > 65535) throw ConfigError("bind port out of range");
  return {host, p};
}

}  // namespace revo::orchestrator
