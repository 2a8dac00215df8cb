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

#include "revo/orchestrator/service.h"

#include <filesystem>
#include <regex>

#include "httplib.h"
#include "revo/common/resources.h"
#include "revo/evolution/database.h"

namespace revo::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

RunHandle::RunHandle(RunConfig config)
    : config_(std::move(config)),
      store_(std::make_unique<RunStore>(RunStore::RunDir(config_.data_dir, config_.run_id))),
      hub_(std::make_unique<FeedbackHub>(config_.run_id, config_.spec.task, config_.feedback,
                                         store_.get(), config_.spec.evolution.seed)) {}

void RunHandle::SetState(const std::string& state, const std::string& error) {
  std::lock_guard lock(mu_);
  state_ = state;
  error_ = error;
}

std::string RunHandle::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

void RunHandle::Observe(const json& checkpoint) {
  std::vector<std::string> ids;
  for (const auto& island : checkpoint.at("database").at("islands"))
    for (const auto& ind : island) ids.push_back(ind.at("id").get<std::string>());
  std::lock_guard lock(mu_);
  generation_ = checkpoint.at("database").value("generation", 0);
  const json& metrics = checkpoint.at("metrics");
  if (!metrics.empty()) {
    best_sigma_ = metrics.back().at("best_sigma").get<double>();
    best_id_ = metrics.back().at("best_id").get<std::string>();
  }
  ids_ = std::move(ids);
}

std::vector<std::string> RunHandle::IndividualIds() const {
  std::lock_guard lock(mu_);
  return ids_;
}

json RunHandle::Summary() const {
  std::lock_guard lock(mu_);
  return {{"run_id", config_.run_id},
          {"task", config_.spec.task},
          {"mode", config_.mode},
          {"search", config_.spec.search},
          {"state", state_}};
}

json RunHandle::Status() const {
  json j = Summary();
  {
    std::lock_guard lock(mu_);
    j["generation"] = generation_;
    j["generations"] = config_.spec.evolution.generations;
    j["population"] = config_.spec.evolution.population;
    j["best_sigma"] = best_sigma_ ? json(*best_sigma_) : json(nullptr);
    j["best_id"] = best_id_;
    j["individuals"] = ids_.size();
    if (!error_.empty()) j["error"] = error_;
  }
  j["metrics"] = store_->LoadMetrics();
  j["feedback"] = hub_->Progress();
  return j;
}

json RunHandle::RatingsJson() const {
  json history = json::array();
  for (const auto& r : hub_->History()) history.push_back(fitness::RecordToJson(r));
  return {{"run_id", config_.run_id},
          {"ratings", hub_->Ratings(IndividualIds())},
          {"matches", history.size()},
          {"history", history}};
}

std::vector<std::shared_ptr<RunHandle>> LoadRunHandles(const std::string& data_dir) {
  std::vector<std::shared_ptr<RunHandle>> out;
  fs::path runs = fs::path(data_dir) / "runs";
  if (!fs::exists(runs)) return out;
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(runs))
    if (e.is_directory() && fs::exists(e.path() / "config.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    json raw = json::parse(ReadFile(dir / "config.json"), nullptr, false);
    if (raw.is_discarded()) throw CheckpointError("corrupt " + (dir / "config.json").string());
    RunConfig config = RunConfigFromJson(raw);
    config.data_dir = data_dir;
    auto handle = std::make_shared<RunHandle>(config);
    auto checkpoint = handle->store().LoadCheckpoint();
    if (checkpoint) handle->Observe(*checkpoint);
    bool finished = checkpoint && checkpoint->value("finished", false);
    handle->SetState(finished ? "finished" : checkpoint ? "stopped" : "created");
    if (finished && config.feedback.final_ranking) {
      auto db = evolution::DatabaseFromJson(checkpoint->at("database"));
      handle->hub().OpenFinalRanking(CandidatesOf(db.All()));
    }
    out.push_back(handle);
  }
  return out;
}

Service::Service() = default;

Service::~Service() { Stop(); }

void Service::AddRun(std::shared_ptr<RunHandle> run) {
  std::lock_guard lock(mu_);
  runs_.push_back(std::move(run));
}

std::shared_ptr<RunHandle> Service::Find(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  for (const auto& r : runs_)
    if (r->config().run_id == run_id) return r;
  return nullptr;
}

namespace {

Service::Response Error(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

}  // namespace

Service::Response Service::Handle(const std::string& method, const std::string& path,
                                  const std::map<std::string, std::string>& query,
                                  const std::string& body) {
  static const std::regex kRunRoute(R"(/runs/([^/]+)/(status|pairs/next|ratings|tags))");
  static const std::regex kRolloutRoute(R"(/rollouts/([^/]+))");
  std::smatch m;

  if (path == "/preferences") {
    if (method != "POST") return Error(405, "use POST");
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) return Error(422, "body is not JSON");
    if (!j.is_object() || !j.contains("ticket_id") || !j["ticket_id"].is_string())
      return Error(422, "ticket_id is required");
    std::string ticket = j["ticket_id"].get<std::string>();
    std::shared_ptr<RunHandle> owner;
    {
      std::lock_guard lock(mu_);
      for (const auto& r : runs_) {
        const std::string prefix = r->config().run_id + "-t";
        if (ticket.rfind(prefix, 0) == 0 &&
            (!owner || r->config().run_id.size() > owner->config().run_id.size()))
          owner = r;
      }
    }
    if (!owner) return Error(404, "unknown ticket " + ticket);
    try {
      return {200, fitness::RecordToJson(owner->hub().Submit(j))};
    } catch (const FeedbackError& e) {
      return Error(e.status(), e.what());
    }
  }
  if (method != "GET") return Error(405, "use GET");
  if (path == "/runs") {
    json list = json::array();
    std::lock_guard lock(mu_);
    for (const auto& r : runs_) list.push_back(r->Summary());
    return {200, list};
  }
  if (std::regex_match(path, m, kRunRoute)) {
    auto run = Find(m[1]);
    if (!run) return Error(404, "unknown run " + m[1].str());
    std::string what = m[2];
    if (what == "status") return {200, run->Status()};
    if (what == "ratings") return {200, run->RatingsJson()};
    if (what == "tags") {
      const auto& v = run->hub().vocabulary();
      return {200, {{"task", v.task}, {"aspects", v.aspects}, {"tags", v.AllTags()}}};
    }
    auto ev = query.find("evaluator");
    if (ev == query.end() || ev->second.empty()) return Error(422, "evaluator is required");
    auto ticket = run->hub().NextPair(ev->second);
    if (!ticket) return {204, nullptr};
    return {200, TicketToJson(*ticket)};
  }
  if (std::regex_match(path, m, kRolloutRoute)) {
    std::string id = m[1];
    std::string run_id, trace_id = id;
    if (auto colon = id.find(':'); colon != std::string::npos) {
      run_id = id.substr(0, colon);
      trace_id = id.substr(colon + 1);
    }
    std::vector<std::shared_ptr<RunHandle>> candidates;
    if (!run_id.empty()) {
      if (auto r = Find(run_id)) candidates.push_back(r);
    } else {
      std::lock_guard lock(mu_);
      candidates = runs_;
    }
    for (const auto& r : candidates) {
      try {
        if (auto trace = r->store().LoadTraceJson(trace_id)) return {200, *trace};
      } catch (const std::exception& e) {
        return Error(500, e.what());
      }
    }
    return Error(404, "unknown rollout " + id);
  }
  return Error(404, "no route for " + path);
}

int Service::Start(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto serve = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    Response r;
    try {
      r = Handle(req.method, req.path, query, req.body);
    } catch (const std::exception& e) {
      r = Error(500, e.what());
    }
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(".*", serve);
  server_->Post(".*", serve);
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  // The feedback UI may be served from another origin.
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ < 0) throw ConfigError("cannot bind " + host);
  } else {
    if (!server_->bind_to_port(host, port)) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Service::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

}  // namespace revo::orchestrator
