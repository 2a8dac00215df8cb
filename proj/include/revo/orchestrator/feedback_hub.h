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

#ifndef REVO_ORCHESTRATOR_FEEDBACK_HUB_H_
#define REVO_ORCHESTRATOR_FEEDBACK_HUB_H_

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "revo/common/random.h"
#include "revo/evolution/scorer.h"
#include "revo/fitness/elo.h"
#include "revo/fitness/feedback.h"
#include "revo/orchestrator/run_config.h"

namespace revo::orchestrator {

class RunStore;

enum class TicketStatus { kPending, kJudged, kExpired };
std::string_view TicketStatusName(TicketStatus status);

struct PairTicket {
  std::string id;
  std::string rollout_a;  // "<run id>:<trace id>", resolvable via GET /rollouts
  std::string rollout_b;
  std::string individual_a;
  std::string individual_b;
  int generation_a = 0;
  int generation_b = 0;
  std::string kind;  // intra | cross | final
  TicketStatus status = TicketStatus::kPending;
  std::string evaluator;
  double issued_at = 0.0;  // seconds on the hub clock
};

nlohmann::json TicketToJson(const PairTicket& ticket);

// A rateable individual as the scheduler sees it.
struct Candidate {
  std::string id;
  int generation = 0;
  std::vector<std::string> rollouts;  // trace ids within the run
};

// Maps to an HTTP status: 404 unknown ticket, 409 not pending, 422 malformed.
class FeedbackError : public Error {
 public:
  FeedbackError(int status, const std::string& message) : Error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Pair scheduling and the match history of one run. Thread safe; all
// history appends go through one lock, which fixes their timestamp order.
class FeedbackHub {
 public:
  using Clock = std::function<double()>;

  // `store` may be null (in-memory history). The history already in the
  // store is loaded.
  FeedbackHub(std::string run_id, std::string task, FeedbackConfig config, RunStore* store,
              uint64_t seed, Clock clock = {});

  // Starts a scoring round: `fresh` individuals need the quorum, `previous`
  // ones are available as cross-generation opponents.
  void Open(std::vector<Candidate> fresh, std::vector<Candidate> previous);
  // Pairs drawn uniformly over every candidate, with no quorum gating.
  void OpenFinalRanking(std::vector<Candidate> all);
  void Close();

  // Nullopt when nothing can be issued to this evaluator right now.
  std::optional<PairTicket> NextPair(const std::string& evaluator);
  // Validates a submitted judgment against its ticket and appends it.
  fitness::PreferenceRecord Submit(const nlohmann::json& body);

  bool QuorumMet() const;
  // Blocks until the quorum is met or `stop` returns true (polled). Returns
  // whether the quorum was met.
  bool WaitForQuorum(const std::function<bool()>& stop);
  void Wake();

  std::vector<fitness::PreferenceRecord> History() const;
  std::map<std::string, double> Ratings(const std::vector<std::string>& ids = {}) const;
  nlohmann::json Progress() const;
  const fitness::TagVocabulary& vocabulary() const { return vocabulary_; }
  const std::string& run_id() const { return run_id_; }

  // Judged records involving `individual`.
  int JudgedCount(const std::string& individual) const;

 private:
  using PairKey = std::pair<std::string, std::string>;
  static PairKey Key(const std::string& a, const std::string& b);

  bool NeedsJudgments(const Candidate& c) const;  // caller holds mu_
  bool QuorumMetLocked() const;
  void ExpireLocked(double now);
  std::string QualifyRollout(const Candidate& c);

  std::string run_id_;
  FeedbackConfig config_;
  fitness::TagVocabulary vocabulary_;
  RunStore* store_;
  Clock clock_;
  Rng rng_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool open_ = false;
  bool final_ = false;
  std::vector<Candidate> fresh_;
  std::vector<Candidate> previous_;
  std::vector<fitness::PreferenceRecord> history_;
  std::map<std::string, int> judged_;
  std::map<std::string, PairTicket> tickets_;
  std::map<std::string, std::set<PairKey>> issued_;  // evaluator -> judged or pending pairs
  int64_t next_ticket_ = 1;
};

// Fitness from human preferences: sigma is the Elo rating after replaying
// the whole match history, lambda is composed from the checkbox tags.
class HumanScorer : public evolution::Scorer {
 public:
  // `stop` is polled while waiting for the quorum; when it returns true the
  // wait ends with evolution::Interrupted.
  HumanScorer(FeedbackHub& hub, std::function<bool()> stop);

  std::string mode() const override { return "human"; }
  double MinFitness() const override { return 0.0; }
  void ScoreOne(evolution::Individual& individual,
                const std::vector<envs::RolloutTrace>& traces) const override;
  void ScoreGeneration(std::vector<evolution::Individual>& fresh,
                       evolution::RewardDatabase& db) override;

 private:
  FeedbackHub& hub_;
  std::function<bool()> stop_;
};

std::vector<Candidate> CandidatesOf(const std::vector<const evolution::Individual*>& individuals);

}  // namespace revo::orchestrator

#endif  // REVO_ORCHESTRATOR_FEEDBACK_HUB_H_
