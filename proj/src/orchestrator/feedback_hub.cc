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

#include "revo/orchestrator/feedback_hub.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "revo/evolution/evolution.h"
#include "revo/orchestrator/store.h"

namespace revo::orchestrator {

using nlohmann::json;

std::string_view TicketStatusName(TicketStatus status) {
  switch (status) {
    case TicketStatus::kPending: return "pending";
    case TicketStatus::kJudged: return "judged";
    case TicketStatus::kExpired: return "expired";
  }
  return "pending";
}

json TicketToJson(const PairTicket& t) {
  return {{"ticket_id", t.id},
          {"rollout_a", t.rollout_a},
          {"rollout_b", t.rollout_b},
          {"individual_a", t.individual_a},
          {"individual_b", t.individual_b},
          {"generation_a", t.generation_a},
          {"generation_b", t.generation_b},
          {"kind", t.kind},
          {"status", TicketStatusName(t.status)},
          {"evaluator", t.evaluator}};
}

FeedbackHub::FeedbackHub(std::string run_id, std::string task, FeedbackConfig config,
                         RunStore* store, uint64_t seed, Clock clock)
    : run_id_(std::move(run_id)),
      config_(config),
      vocabulary_(fitness::LoadTagVocabulary(task)),
      store_(store),
      clock_(std::move(clock)),
      rng_(MixSeed({seed, 0x5c})) {
  if (!clock_) {
    auto start = std::chrono::steady_clock::now();
    clock_ = [start] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
  }
  if (store_) history_ = store_->LoadMatchHistory();
  for (const auto& r : history_) {
    ++judged_[r.individual_a];
    if (r.individual_b != r.individual_a) ++judged_[r.individual_b];
    issued_[r.evaluator].insert(Key(r.individual_a, r.individual_b));
  }
}

FeedbackHub::PairKey FeedbackHub::Key(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

void FeedbackHub::Open(std::vector<Candidate> fresh, std::vector<Candidate> previous) {
  std::lock_guard lock(mu_);
  fresh_ = std::move(fresh);
  previous_ = std::move(previous);
  // A fresh individual is never its own cross-generation opponent.
  std::erase_if(previous_, [&](const Candidate& p) {
    return std::any_of(fresh_.begin(), fresh_.end(), [&](const Candidate& f) { return f.id == p.id; });
  });
  open_ = true;
  final_ = false;
  cv_.notify_all();
}

void FeedbackHub::OpenFinalRanking(std::vector<Candidate> all) {
  std::lock_guard lock(mu_);
  fresh_ = std::move(all);
  previous_.clear();
  open_ = true;
  final_ = true;
}

void FeedbackHub::Close() {
  std::lock_guard lock(mu_);
  open_ = false;
  final_ = false;
  fresh_.clear();
  previous_.clear();
  for (auto& [id, t] : tickets_)
    if (t.status == TicketStatus::kPending) {
      t.status = TicketStatus::kExpired;
      issued_[t.evaluator].erase(Key(t.individual_a, t.individual_b));
    }
}

void FeedbackHub::ExpireLocked(double now) {
  for (auto& [id, t] : tickets_) {
    if (t.status != TicketStatus::kPending || now - t.issued_at < config_.ticket_ttl_seconds) continue;
    t.status = TicketStatus::kExpired;
    issued_[t.evaluator].erase(Key(t.individual_a, t.individual_b));
  }
}

bool FeedbackHub::NeedsJudgments(const Candidate& c) const {
  auto it = judged_.find(c.id);
  return (it == judged_.end() ? 0 : it->second) < config_.quorum;
}

std::string FeedbackHub::QualifyRollout(const Candidate& c) {
  return run_id_ + ":" + c.rollouts[UniformIndex(rng_, c.rollouts.size())];
}

std::optional<PairTicket> FeedbackHub::NextPair(const std::string& evaluator) {
  if (evaluator.empty()) throw FeedbackError(422, "evaluator is required");
  std::lock_guard lock(mu_);
  double now = clock_();
  ExpireLocked(now);
  if (!open_) return std::nullopt;
  const auto& seen = issued_[evaluator];
  auto fresh_pair = [&](const Candidate& a, const Candidate& b) {
    return !seen.count(Key(a.id, b.id));
  };

  using Pair = std::pair<const Candidate*, const Candidate*>;
  std::vector<Pair> intra, cross;
  for (size_t i = 0; i < fresh_.size(); ++i) {
    const Candidate& a = fresh_[i];
    size_t first = config_.allow_self_pairs ? i : i + 1;
    for (size_t j = first; j < fresh_.size(); ++j) {
      const Candidate& b = fresh_[j];
      if (!final_ && !NeedsJudgments(a) && !NeedsJudgments(b)) continue;
      if (fresh_pair(a, b)) intra.push_back({&a, &b});
    }
    if (final_ || !NeedsJudgments(a)) continue;
    for (const auto& p : previous_)
      if (fresh_pair(a, p)) cross.push_back({&a, &p});
  }
  std::vector<Pair>* pool = Bernoulli(rng_, config_.cross_generation) ? &cross : &intra;
  if (pool->empty()) pool = pool == &cross ? &intra : &cross;
  if (pool->empty()) return std::nullopt;

  Pair pick = (*pool)[UniformIndex(rng_, pool->size())];
  if (Bernoulli(rng_, 0.5)) std::swap(pick.first, pick.second);
  PairTicket t;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "-t%06lld", static_cast<long long>(next_ticket_++));
  t.id = run_id_ + buf;
  t.individual_a = pick.first->id;
  t.individual_b = pick.second->id;
  t.generation_a = pick.first->generation;
  t.generation_b = pick.second->generation;
  t.rollout_a = QualifyRollout(*pick.first);
  t.rollout_b = QualifyRollout(*pick.second);
  t.kind = final_ ? "final" : pool == &cross ? "cross" : "intra";
  t.evaluator = evaluator;
  t.issued_at = now;
  issued_[evaluator].insert(Key(t.individual_a, t.individual_b));
  tickets_[t.id] = t;
  return t;
}

fitness::PreferenceRecord FeedbackHub::Submit(const json& body) {
  if (!body.is_object()) throw FeedbackError(422, "body must be a JSON object");
  auto text = [&](const char* key) -> std::optional<std::string> {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    if (!body[key].is_string()) throw FeedbackError(422, std::string(key) + " must be a string");
    return body[key].get<std::string>();
  };
  auto ticket_id = text("ticket_id");
  if (!ticket_id) throw FeedbackError(422, "ticket_id is required");
  auto outcome_name = text("outcome");
  if (!outcome_name) throw FeedbackError(422, "outcome is required");
  fitness::Outcome outcome;
  try {
    outcome = fitness::ParseOutcome(*outcome_name);
  } catch (const Error&) {
    throw FeedbackError(422, "outcome must be A, B or tie");
  }
  auto tags = [&](const char* key) {
    std::vector<std::string> out;
    if (!body.contains(key)) return out;
    if (!body[key].is_array()) throw FeedbackError(422, std::string(key) + " must be an array");
    for (const auto& t : body[key]) {
      if (!t.is_string()) throw FeedbackError(422, std::string(key) + " entries must be strings");
      auto tag = fitness::ParseTag(t.get<std::string>());
      if (!tag || !vocabulary_.Contains(tag->aspect))
        throw FeedbackError(422, "unknown tag: " + t.get<std::string>());
      out.push_back(tag->ToString());
    }
    return out;
  };
  std::vector<std::string> tags_a = tags("tags_a");
  std::vector<std::string> tags_b = tags("tags_b");

  std::lock_guard lock(mu_);
  auto it = tickets_.find(*ticket_id);
  if (it == tickets_.end()) throw FeedbackError(404, "unknown ticket " + *ticket_id);
  ExpireLocked(clock_());
  PairTicket& t = it->second;
  if (t.status == TicketStatus::kJudged) throw FeedbackError(409, "ticket already judged");
  if (t.status == TicketStatus::kExpired) throw FeedbackError(409, "ticket expired");
  auto must_match = [&](const char* key, const std::string& want) {
    auto got = text(key);
    if (got && *got != want) throw FeedbackError(422, std::string(key) + " does not match the ticket");
  };
  must_match("evaluator", t.evaluator);
  must_match("rollout_a", t.rollout_a);
  must_match("rollout_b", t.rollout_b);
  must_match("individual_a", t.individual_a);
  must_match("individual_b", t.individual_b);

  fitness::PreferenceRecord r;
  r.ticket_id = t.id;
  r.rollout_a = t.rollout_a;
  r.rollout_b = t.rollout_b;
  r.individual_a = t.individual_a;
  r.individual_b = t.individual_b;
  r.outcome = outcome;
  r.tags_a = std::move(tags_a);
  r.tags_b = std::move(tags_b);
  r.evaluator = t.evaluator;
  r.timestamp = history_.empty() ? 1 : history_.back().timestamp + 1;
  if (store_) store_->AppendPreference(r);
  history_.push_back(r);
  ++judged_[r.individual_a];
  if (r.individual_b != r.individual_a) ++judged_[r.individual_b];
  t.status = TicketStatus::kJudged;
  cv_.notify_all();
  return r;
}

bool FeedbackHub::QuorumMetLocked() const {
  if (!open_ || final_) return true;
  for (const auto& c : fresh_) {
    if (!NeedsJudgments(c)) continue;
    // An individual with no possible opponent can never reach the quorum.
    bool has_opponent = config_.allow_self_pairs || fresh_.size() + previous_.size() >= 2;
    if (has_opponent) return false;
  }
  return true;
}

bool FeedbackHub::QuorumMet() const {
  std::lock_guard lock(mu_);
  return QuorumMetLocked();
}

bool FeedbackHub::WaitForQuorum(const std::function<bool()>& stop) {
  std::unique_lock lock(mu_);
  while (!QuorumMetLocked()) {
    if (stop && stop()) return false;
    cv_.wait_for(lock, std::chrono::milliseconds(200));
  }
  return true;
}

void FeedbackHub::Wake() { cv_.notify_all(); }

std::vector<fitness::PreferenceRecord> FeedbackHub::History() const {
  std::lock_guard lock(mu_);
  return history_;
}

std::map<std::string, double> FeedbackHub::Ratings(const std::vector<std::string>& ids) const {
  std::lock_guard lock(mu_);
  return fitness::RerateAll(history_, ids);
}

int FeedbackHub::JudgedCount(const std::string& individual) const {
  std::lock_guard lock(mu_);
  auto it = judged_.find(individual);
  return it == judged_.end() ? 0 : it->second;
}

json FeedbackHub::Progress() const {
  std::lock_guard lock(mu_);
  json individuals = json::array();
  for (const auto& c : fresh_) {
    auto it = judged_.find(c.id);
    individuals.push_back({{"id", c.id},
                           {"generation", c.generation},
                           {"judged", it == judged_.end() ? 0 : it->second}});
  }
  int pending = 0;
  for (const auto& [id, t] : tickets_) pending += t.status == TicketStatus::kPending;
  return {{"open", open_},
          {"final_ranking", final_},
          {"quorum", config_.quorum},
          {"quorum_met", QuorumMetLocked()},
          {"individuals", individuals},
          {"pending_tickets", pending},
          {"matches", history_.size()}};
}

std::vector<Candidate> CandidatesOf(const std::vector<const evolution::Individual*>& individuals) {
  std::vector<Candidate> out;
  for (const auto* ind : individuals) {
    if (ind->degenerate || ind->rollouts.empty()) continue;
    out.push_back({ind->id, ind->generation, ind->rollouts});
  }
  return out;
}

HumanScorer::HumanScorer(FeedbackHub& hub, std::function<bool()> stop)
    : hub_(hub), stop_(std::move(stop)) {}

void HumanScorer::ScoreOne(evolution::Individual& individual,
                           const std::vector<envs::RolloutTrace>&) const {
  individual.sigma = fitness::kEloInitial;
  individual.lambda.clear();
}

void HumanScorer::ScoreGeneration(std::vector<evolution::Individual>& fresh,
                                  evolution::RewardDatabase& db) {
  std::vector<const evolution::Individual*> fresh_ptrs;
  for (const auto& f : fresh) fresh_ptrs.push_back(&f);
  hub_.Open(CandidatesOf(fresh_ptrs), CandidatesOf(db.All()));
  bool met = hub_.WaitForQuorum(stop_);
  hub_.Close();
  if (!met) throw evolution::Interrupted();

  std::vector<fitness::PreferenceRecord> history = hub_.History();
  std::map<std::string, double> ratings = hub_.Ratings();
  auto rescore = [&](evolution::Individual& ind) {
    if (ind.degenerate) return;
    auto it = ratings.find(ind.id);
    ind.sigma = it == ratings.end() ? fitness::kEloInitial : it->second;
    ind.lambda = fitness::ComposeFeedback(fitness::TagsFor(history, ind.id));
  };
  for (auto& f : fresh) rescore(f);
  for (auto& island : db.islands)
    for (auto& ind : island) rescore(ind);
  db.match_history = std::move(history);
}

}  // namespace revo::orchestrator
