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

#include "revo/fitness/elo.h"

#include <algorithm>
#include <cmath>

#include "revo/common/error.h"

namespace revo::fitness {

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAWins:
      return "A";
    case Outcome::kBWins:
      return "B";
    case Outcome::kTie:
      return "tie";
  }
  return "tie";
}

Outcome ParseOutcome(std::string_view name) {
  if (name == "A") return Outcome::kAWins;
  if (name == "B") return Outcome::kBWins;
  if (name == "tie") return Outcome::kTie;
  throw Error("unknown outcome '" + std::string(name) + "'");
}

nlohmann::json RecordToJson(const PreferenceRecord& r) {
  return nlohmann::json{{"ticket_id", r.ticket_id},
                        {"rollout_a", r.rollout_a},
                        {"rollout_b", r.rollout_b},
                        {"individual_a", r.individual_a},
                        {"individual_b", r.individual_b},
                        {"outcome", std::string(OutcomeName(r.outcome))},
                        {"tags_a", r.tags_a},
                        {"tags_b", r.tags_b},
                        {"evaluator", r.evaluator},
                        {"timestamp", r.timestamp}};
}

PreferenceRecord RecordFromJson(const nlohmann::json& j) {
  try {
    PreferenceRecord r;
    r.ticket_id = j.value("ticket_id", "");
    r.rollout_a = j.value("rollout_a", "");
    r.rollout_b = j.value("rollout_b", "");
    r.individual_a = j.at("individual_a").get<std::string>();
    r.individual_b = j.at("individual_b").get<std::string>();
    r.outcome = ParseOutcome(j.at("outcome").get<std::string>());
    r.tags_a = j.value("tags_a", std::vector<std::string>{});
    r.tags_b = j.value("tags_b", std::vector<std::string>{});
    r.evaluator = j.value("evaluator", "");
    r.timestamp = j.value("timestamp", int64_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed preference record: ") + e.what());
  }
}

std::pair<double, double> EloExpected(double sa, double sb) {
  double ea = 1.0 / (1.0 + std::pow(10.0, (sb - sa) / 400.0));
  double eb = 1.0 / (1.0 + std::pow(10.0, (sa - sb) / 400.0));
  return {ea, eb};
}

double EloState::Rating(const std::string& id) const {
  auto it = ratings_.find(id);
  return it == ratings_.end() ? kEloInitial : it->second;
}

void EloState::Update(const PreferenceRecord& record) {
  double sa = Rating(record.individual_a);
  double sb = Rating(record.individual_b);
  double fa = record.outcome == Outcome::kAWins ? 1.0 : record.outcome == Outcome::kBWins ? 0.0 : 0.5;
  // One delta applied with opposite signs keeps the update exactly zero-sum
  // up to the rounding of each addition.
  double delta = k_ * (fa - EloExpected(sa, sb).first);
  if (record.individual_a == record.individual_b) {
    ratings_[record.individual_a] = sa;
    return;
  }
  ratings_[record.individual_a] = sa + delta;
  ratings_[record.individual_b] = sb - delta;
}

std::map<std::string, double> RerateAll(const std::vector<PreferenceRecord>& history,
                                        const std::vector<std::string>& ids, double k) {
  std::vector<const PreferenceRecord*> ordered;
  ordered.reserve(history.size());
  for (const auto& r : history) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });
  EloState state(k);
  for (const auto* r : ordered) state.Update(*r);
  std::map<std::string, double> out = state.ratings();
  for (const auto& id : ids) out.emplace(id, kEloInitial);
  return out;
}

}  // namespace revo::fitness
