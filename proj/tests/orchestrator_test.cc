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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "revo/common/resources.h"
#include "revo/envs/env.h"
#include "revo/orchestrator/feedback_hub.h"
#include "revo/orchestrator/run_config.h"
#include "revo/orchestrator/runner.h"
#include "revo/orchestrator/service.h"
#include "revo/orchestrator/store.h"

namespace revo::orchestrator {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path FreshDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("revo_orchestrator_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

envs::RolloutTrace RandomTrace(const std::string& id, uint64_t seed) {
  auto env = envs::MakeEnvironment("latch");
  Rng rng(seed);
  auto trace = envs::RecordRollout(*env, seed, [&](const envs::Environment& e) {
    return static_cast<int>(UniformIndex(rng, static_cast<size_t>(e.num_actions())));
  });
  trace.id = id;
  return trace;
}

std::vector<Candidate> MakeCandidates(const std::string& prefix, int n, int generation) {
  std::vector<Candidate> out;
  for (int i = 0; i < n; ++i) {
    std::string id = prefix + std::to_string(i);
    out.push_back({id, generation, {id + "-r0", id + "-r1"}});
  }
  return out;
}

json Judgment(const PairTicket& t, const std::string& outcome) {
  return {{"ticket_id", t.id}, {"outcome", outcome}, {"evaluator", t.evaluator}};
}

RunConfig TinyConfig(const fs::path& dir, const std::string& mode) {
  json j = {{"task", "latch"},
            {"mode", mode},
            {"evolution", {{"generations", 2}, {"population", 3}, {"islands", 2}, {"seed", 3}}},
            {"trainer", {{"budget", 5000}, {"eval_episodes", 2}}},
            {"feedback", {{"quorum", 2}}},
            {"data_dir", dir.string()},
            {"bind", "127.0.0.1:0"}};
  return RunConfigFromJson(j);
}

TEST_CASE("run config defaults, validation and JSON") {
  RunConfig c = RunConfigFromJson(json::object());
  CHECK(c.mode == "auto");
  CHECK(c.spec.task == "drive");
  CHECK(c.spec.search == "revolve");
  CHECK(c.backend.kind == "mock");
  CHECK(c.feedback.quorum == 5);
  CHECK(c.feedback.cross_generation == 0.5);
  CHECK(c.spec.evolution.generations == 7);
  CHECK(c.spec.evolution.population == 16);
  CHECK(c.spec.evolution.islands == 13);
  CHECK(c.run_id == "drive-revolve-auto-s0");
  CHECK(RunConfigToJson(RunConfigFromJson(RunConfigToJson(c))) == RunConfigToJson(c));

  CHECK_THROWS_AS(RunConfigFromJson({{"mode", "robot"}}), ConfigError);
  CHECK_THROWS_AS(RunConfigFromJson({{"task", "chess"}}), ConfigError);
  CHECK_THROWS_AS(RunConfigFromJson({{"colour", "red"}}), ConfigError);
  CHECK_THROWS_AS(RunConfigFromJson({{"bind", "localhost"}}), ConfigError);
  CHECK_THROWS_AS(RunConfigFromJson({{"run_id", "../escape"}}), ConfigError);
  CHECK_THROWS_AS(RunConfigFromJson({{"feedback", {{"quorum", 0}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfigFromJson({{"backend", {{"kind", "oracle"}}}}), ConfigError);
  CHECK(ParseBind("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});

  for (const auto& e : fs::directory_iterator(fs::path(REVO_SOURCE_DIR) / "configs"))
    CHECK_NOTHROW(LoadRunConfig(e.path().string()));
}

TEST_CASE("store round trips traces, history, checkpoints and metrics") {
  RunStore store(FreshDir("store"));
  auto trace = RandomTrace("g01-s00-r0", 4);
  store.SaveTrace(trace);
  auto loaded = store.LoadTraceJson("g01-s00-r0");
  REQUIRE(loaded);
  CHECK(*loaded == envs::TraceToJson(trace));
  CHECK(envs::TraceToJson(envs::TraceFromJson(*loaded)) == envs::TraceToJson(trace));
  CHECK(!store.LoadTraceJson("missing"));
  CHECK(!store.LoadTraceJson("../config"));

  std::vector<fitness::PreferenceRecord> records;
  for (int i = 0; i < 3; ++i) {
    fitness::PreferenceRecord r;
    r.ticket_id = "t" + std::to_string(i);
    r.individual_a = "a";
    r.individual_b = "b" + std::to_string(i);
    r.outcome = i == 1 ? fitness::Outcome::kTie : fitness::Outcome::kBWins;
    r.tags_a = {"door opening: negative"};
    r.evaluator = "ev";
    r.timestamp = i + 1;
    store.AppendPreference(r);
    records.push_back(r);
  }
  auto history = store.LoadMatchHistory();
  REQUIRE(history.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(fitness::RecordToJson(history[i]) == fitness::RecordToJson(records[i]));

  {  // a torn final line is dropped, damage before it is not
    std::ofstream out(store.root() / "match_history.jsonl", std::ios::app);
    out << "{\"ticket_id\": \"t9\", \"indiv";
  }
  CHECK(store.LoadMatchHistory().size() == 3);
  CHECK_THROWS_AS(ParseMatchHistory("{oops\n{}\n"), CheckpointError);

  evolution::RewardDatabase db;
  db.islands.resize(2);
  evolution::Individual ind;
  ind.id = "g01-s00";
  ind.sigma = 0.1 + 0.2;
  ind.rollouts = {"g01-s00-r0"};
  db.islands[1].push_back(ind);
  db.match_history = records;
  store.SaveCheckpoint({{"database", evolution::DatabaseToJson(db)}});
  auto back = evolution::DatabaseFromJson(store.LoadCheckpoint()->at("database"));
  CHECK(evolution::DatabaseToJson(back) == evolution::DatabaseToJson(db));
  CHECK(back.islands[1][0].sigma == 0.1 + 0.2);

  store.WriteMetrics(json::array({{{"generation", 1}}, {{"generation", 2}}}));
  CHECK(store.LoadMetrics().size() == 2);
  CHECK(SafeName("g01-s00-r0"));
  CHECK(!SafeName(".hidden"));
  CHECK(!SafeName("a/b"));
}

TEST_CASE("scheduler pairs distinct individuals and never repeats a pair") {
  FeedbackConfig cfg;
  cfg.quorum = 1000;  // keep every fresh individual eligible
  FeedbackHub hub("run", "drive", cfg, nullptr, 1);
  hub.Open(MakeCandidates("new", 6, 3), MakeCandidates("old", 10, 1));
  int intra = 0, cross = 0;
  for (int e = 0; e < 5; ++e) {
    std::string ev = "ev" + std::to_string(e);
    std::set<std::pair<std::string, std::string>> seen;
    while (auto t = hub.NextPair(ev)) {
      CHECK(t->individual_a != t->individual_b);
      auto key = std::minmax(t->individual_a, t->individual_b);
      REQUIRE(seen.insert(key).second);
      CHECK(t->rollout_a.rfind("run:" + t->individual_a + "-r", 0) == 0);
      bool a_new = t->individual_a.rfind("new", 0) == 0;
      bool b_new = t->individual_b.rfind("new", 0) == 0;
      CHECK((a_new || b_new));
      if (t->kind == "intra") {
        CHECK((a_new && b_new));
        ++intra;
      } else {
        CHECK(t->kind == "cross");
        CHECK(a_new != b_new);
        ++cross;
      }
      if (seen.size() % 2 == 0) hub.Submit(Judgment(*t, "A"));
    }
    // 15 intra + 60 cross pairs, all handed out exactly once.
    CHECK(seen.size() == 75);
  }
  CHECK(intra == 75);
  CHECK(cross == 300);
}

TEST_CASE("scheduler mixes generations about evenly while both kinds remain") {
  FeedbackConfig cfg;
  cfg.quorum = 1000;
  FeedbackHub hub("run", "drive", cfg, nullptr, 2);
  hub.Open(MakeCandidates("new", 40, 2), MakeCandidates("old", 40, 1));
  int cross = 0;
  const int draws = 400;  // far fewer than either pool holds
  for (int i = 0; i < draws; ++i) cross += hub.NextPair("ev")->kind == "cross";
  CHECK(cross > 160);
  CHECK(cross < 240);
}

TEST_CASE("quorum gates and submissions are validated") {
  double now = 0.0;
  FeedbackConfig cfg;
  cfg.quorum = 2;
  cfg.ticket_ttl_seconds = 10.0;
  FeedbackHub hub("r", "latch", cfg, nullptr, 3, [&] { return now; });
  CHECK(!hub.NextPair("ev"));  // nothing open
  CHECK_THROWS_AS(hub.NextPair(""), FeedbackError);
  hub.Open(MakeCandidates("n", 3, 1), {});
  CHECK(!hub.QuorumMet());

  auto t = *hub.NextPair("ev");
  auto status = [&](const json& body) {
    try {
      hub.Submit(body);
      return 200;
    } catch (const FeedbackError& e) {
      return e.status();
    }
  };
  CHECK(status(json::array()) == 422);
  CHECK(status({{"outcome", "A"}}) == 422);
  CHECK(status({{"ticket_id", "nope"}, {"outcome", "A"}}) == 404);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "C"}}) == 422);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "A"}, {"tags_a", {"speed: positive"}}}) == 422);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "A"}, {"tags_a", {"door opening"}}}) == 422);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "A"}, {"evaluator", "mallory"}}) == 422);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "A"}, {"individual_a", "zzz"}}) == 422);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "tie"}, {"tags_b", {"door opening: positive"}}}) == 200);
  CHECK(status({{"ticket_id", t.id}, {"outcome", "A"}}) == 409);

  // An expired ticket frees its pair for the same evaluator.
  auto stale = *hub.NextPair("slow");
  now = 11.0;
  CHECK(status(Judgment(stale, "A")) == 409);
  bool reissued = false;
  for (int i = 0; i < 3 && !reissued; ++i) {
    auto again = hub.NextPair("slow");
    REQUIRE(again);
    reissued = std::minmax(again->individual_a, again->individual_b) ==
               std::minmax(stale.individual_a, stale.individual_b);
    hub.Submit(Judgment(*again, "B"));
  }
  CHECK(reissued);

  // Judge until the quorum is met; the waiter wakes up.
  std::atomic<bool> met{false};
  std::thread waiter([&] { met = hub.WaitForQuorum([] { return false; }); });
  for (int e = 0; e < 10 && !hub.QuorumMet(); ++e)
    while (auto p = hub.NextPair("bulk" + std::to_string(e))) hub.Submit(Judgment(*p, "A"));
  waiter.join();
  CHECK(met);
  for (const auto& c : MakeCandidates("n", 3, 1)) CHECK(hub.JudgedCount(c.id) >= 2);

  auto history = hub.History();
  for (size_t i = 0; i < history.size(); ++i) CHECK(history[i].timestamp == static_cast<int64_t>(i + 1));
  hub.Close();
  CHECK(!hub.NextPair("late"));
  CHECK(hub.WaitForQuorum([] { return true; }));

  FeedbackHub lonely("r2", "latch", cfg, nullptr, 3);
  lonely.Open(MakeCandidates("solo", 1, 1), {});
  CHECK(lonely.QuorumMet());  // no opponent exists, so nothing can be asked
}

TEST_CASE("concurrent submissions get a total timestamp order") {
  FeedbackConfig cfg;
  cfg.quorum = 1000;
  RunStore store(FreshDir("concurrent"));
  FeedbackHub hub("run", "drive", cfg, &store, 4);
  hub.Open(MakeCandidates("n", 12, 1), {});
  std::vector<PairTicket> tickets;
  for (int i = 0; i < 64; ++i) tickets.push_back(*hub.NextPair("ev" + std::to_string(i % 4)));
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w)
    threads.emplace_back([&, w] {
      for (size_t i = static_cast<size_t>(w); i < tickets.size(); i += 4) hub.Submit(Judgment(tickets[i], "A"));
    });
  for (auto& t : threads) t.join();
  auto history = store.LoadMatchHistory();
  REQUIRE(history.size() == 64);
  std::set<std::string> ids;
  for (size_t i = 0; i < history.size(); ++i) {
    CHECK(history[i].timestamp == static_cast<int64_t>(i + 1));
    ids.insert(history[i].ticket_id);
  }
  CHECK(ids.size() == 64);

  // A restarted hub picks up the history and the evaluators' judged pairs.
  FeedbackHub reloaded("run", "drive", cfg, &store, 4);
  CHECK(reloaded.History().size() == 64);
  CHECK(reloaded.Ratings() == hub.Ratings());
}

struct HttpFixture {
  fs::path dir = FreshDir("http");
  std::shared_ptr<RunHandle> run;
  Service service;
  int port = 0;

  HttpFixture() {
    RunConfig cfg = TinyConfig(dir, "human");
    cfg.run_id = "fresh";
    run = std::make_shared<RunHandle>(cfg);
    run->store().SaveTrace(RandomTrace("A-r0", 1));
    run->store().SaveTrace(RandomTrace("B-r0", 2));
    run->hub().Open({{"A", 1, {"A-r0"}}, {"B", 1, {"B-r0"}}}, {});
    service.AddRun(run);
    port = service.Start("127.0.0.1", 0);
  }
};

TEST_CASE("HTTP round trip from pair to ratings") {
  HttpFixture f;
  httplib::Client http("127.0.0.1", f.port);

  auto runs = http.Get("/runs");
  REQUIRE(runs);
  CHECK(runs->status == 200);
  CHECK(json::parse(runs->body)[0]["run_id"] == "fresh");

  auto ratings = json::parse(http.Get("/runs/fresh/ratings")->body);
  CHECK(ratings["matches"] == 0);

  CHECK(http.Get("/runs/fresh/pairs/next")->status == 422);
  CHECK(http.Get("/runs/nope/pairs/next?evaluator=e1")->status == 404);
  auto next = http.Get("/runs/fresh/pairs/next?evaluator=e1");
  REQUIRE(next->status == 200);
  json ticket = json::parse(next->body);
  CHECK(ticket["status"] == "pending");
  CHECK(http.Get("/runs/fresh/pairs/next?evaluator=e1")->status == 204);  // only pair already issued

  auto trace = http.Get("/rollouts/" + ticket["rollout_a"].get<std::string>());
  REQUIRE(trace->status == 200);
  json tj = json::parse(trace->body);
  CHECK(!tj["steps"].empty());
  CHECK(envs::CheckTraceSchema(envs::TraceFromJson(tj), envs::TaskSchema("latch")).empty());
  CHECK(http.Get("/rollouts/fresh:missing")->status == 404);
  CHECK(http.Get("/rollouts/B-r0")->status == 200);

  // Make A the winner whichever side it was drawn on.
  std::string a_side = ticket["individual_a"] == "A" ? "A" : "B";
  std::string a_tag_key = a_side == "A" ? "tags_b" : "tags_a";  // tags of the loser
  json body = {{"ticket_id", ticket["ticket_id"]},
               {"outcome", a_side},
               {"evaluator", "e1"},
               {a_tag_key, {"quick completion: negative"}}};
  auto post = http.Post("/preferences", body.dump(), "application/json");
  REQUIRE(post->status == 200);
  CHECK(json::parse(post->body)["timestamp"] == 1);
  CHECK(http.Post("/preferences", body.dump(), "application/json")->status == 409);
  CHECK(http.Post("/preferences", "{not json", "application/json")->status == 422);
  CHECK(http.Post("/preferences", json{{"ticket_id", "fresh-t999"}, {"outcome", "A"}}.dump(),
                  "application/json")->status == 404);

  ratings = json::parse(http.Get("/runs/fresh/ratings")->body);
  CHECK(ratings["ratings"]["A"] == 1516.0);
  CHECK(ratings["ratings"]["B"] == 1484.0);
  CHECK(ratings["history"].size() == 1);

  auto tags = json::parse(http.Get("/runs/fresh/tags")->body);
  CHECK(tags["aspects"] == fitness::LoadTagVocabulary("latch").aspects);
  auto status = json::parse(http.Get("/runs/fresh/status")->body);
  CHECK(status["mode"] == "human");
  CHECK(status["feedback"]["matches"] == 1);
  CHECK(http.Get("/unknown")->status == 404);
  CHECK(http.Post("/runs", "", "application/json")->status == 405);

  auto history = f.run->store().LoadMatchHistory();
  REQUIRE(history.size() == 1);
  CHECK(fitness::TagsFor(history, "B") == std::vector<std::string>{"quick completion: negative"});
}

TEST_CASE("auto runs persist, resume after an interruption and export") {
  fs::path dir = FreshDir("runner");
  RunConfig cfg = TinyConfig(dir, "auto");
  auto full = StartRun(cfg);
  CHECK(fs::exists(fs::path(full.run_dir) / "result.json"));
  CHECK_THROWS_AS(StartRun(cfg), ConfigError);

  cfg.run_id = "interrupted";
  int calls = 0;
  RunOptions stop_early;
  stop_early.interrupt = [&] { return ++calls == 4; };
  CHECK_THROWS_AS(StartRun(cfg, stop_early), evolution::Interrupted);
  auto resumed = ResumeRun(dir.string(), "interrupted");
  CHECK(evolution::ResultToJson(resumed.result).dump() == evolution::ResultToJson(full.result).dump());

  RunStore store(fs::path(full.run_dir));
  CHECK(store.LoadMetrics().size() == 2);
  for (const auto& id : full.result.best.rollouts) CHECK(store.LoadTraceJson(id));

  auto manifest = ExportRun(dir.string(), cfg.run_id, (dir / "export").string());
  CHECK(manifest["best_id"] == full.result.best.id);
  CHECK(fs::exists(dir / "export" / "best.dsl"));
  CHECK(fs::exists(dir / "export" / "best.qtb"));
  CHECK(trainer::LoadPolicy(ReadFile(dir / "export" / "best.qtb")) != nullptr);
  CHECK_THROWS_AS(ResumeRun(dir.string(), "never-started"), CheckpointError);
}

TEST_CASE("human runs block on the quorum and score by Elo") {
  fs::path dir = FreshDir("human");
  RunConfig cfg = TinyConfig(dir, "human");
  std::atomic<int> port{0};
  std::atomic<bool> done{false};
  RunOptions options;
  options.on_listening = [&](int p) { port = p; };
  std::optional<RunOutcome> outcome;
  std::thread runner([&] {
    outcome = StartRun(cfg, options);
    done = true;
  });

  // A scripted evaluator prefers the lexicographically smaller individual.
  int judged = 0;
  while (!done) {
    if (port == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      continue;
    }
    httplib::Client http("127.0.0.1", port);
    auto next = http.Get("/runs/" + cfg.run_id + "/pairs/next?evaluator=script");
    if (!next || next->status != 200) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      continue;
    }
    json t = json::parse(next->body);
    std::string winner = t["individual_a"] < t["individual_b"] ? "A" : "B";
    json body = {{"ticket_id", t["ticket_id"]},
                 {"outcome", winner},
                 {"tags_a", {winner == "A" ? "door opening: positive" : "wasted motion: negative"}}};
    auto post = http.Post("/preferences", body.dump(), "application/json");
    if (post && post->status == 200) ++judged;
  }
  runner.join();
  REQUIRE(outcome);
  const auto& r = outcome->result;
  CHECK(judged >= 3);  // every new individual reached the quorum of 2
  RunStore store(fs::path(outcome->run_dir));
  auto history = store.LoadMatchHistory();
  CHECK(history.size() == static_cast<size_t>(judged));
  auto ratings = fitness::RerateAll(history);
  for (const auto* ind : r.database.All()) {
    CHECK(ind->sigma == ratings.at(ind->id));
    CHECK(ind->lambda == fitness::ComposeFeedback(fitness::TagsFor(history, ind->id)));
  }
  CHECK(r.database.match_history.size() == history.size());
}

TEST_CASE("bench compares both searches on equal budgets") {
  BenchOptions opts;
  opts.tasks = {"latch"};
  opts.seeds = 2;
  opts.evolution.generations = 2;
  opts.evolution.population = 4;
  opts.evolution.islands = 3;
  opts.budget = 3000;
  json out = RunBench(opts);
  CHECK(out["runs"].size() == 4);
  CHECK(out["summary"]["latch"]["budgets_equal"] == true);
  CHECK(out["summary"]["latch"]["traces_non_decreasing"] == true);
  CHECK(out["plot"]["latch"]["revolve"].size() == 2);
  CHECK(Median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(Median({4.0, 1.0, 2.0, 3.0}) == 2.5);

  fs::path dir = FreshDir("rate");
  RunStore store(dir);
  fitness::PreferenceRecord rec;
  rec.individual_a = "A";
  rec.individual_b = "B";
  rec.outcome = fitness::Outcome::kAWins;
  rec.timestamp = 1;
  store.AppendPreference(rec);
  json rated = RateHistory((dir / "match_history.jsonl").string(), 32.0);
  CHECK(rated["ratings"]["A"] == 1516.0);
  CHECK(rated["ratings"]["B"] == 1484.0);
}

}  // namespace
}  // namespace revo::orchestrator
