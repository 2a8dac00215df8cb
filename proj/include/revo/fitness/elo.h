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

#ifndef REVO_FITNESS_ELO_H_
#define REVO_FITNESS_ELO_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace revo::fitness {

inline constexpr double kEloInitial = 1500.0;
inline constexpr double kEloK = 32.0;

enum class Outcome { kAWins, kBWins, kTie };

std::string_view OutcomeName(Outcome outcome);  // "A", "B", "tie"
// Throws revo::Error for anything else.
Outcome ParseOutcome(std::string_view name);

struct PreferenceRecord {
  std::string ticket_id;
  std::string rollout_a;
  std::string rollout_b;
  std::string individual_a;
  std::string individual_b;
  Outcome outcome = Outcome::kTie;
  std::vector<std::string> tags_a;  // "aspect: positive" / "aspect: negative"
  std::vector<std::string> tags_b;
  std::string evaluator;
  int64_t timestamp = 0;  // logical sequence number assigned on append
};

nlohmann::json RecordToJson(const PreferenceRecord& record);
PreferenceRecord RecordFromJson(const nlohmann::json& j);

// Expected scores (E_A, E_B) under the logistic model with a 400-point scale.
std::pair<double, double> EloExpected(double sa, double sb);

class EloState {
 public:
  explicit EloState(double k = kEloK) : k_(k) {}

  double Rating(const std::string& id) const;
  // Applies one match; absent ids start at kEloInitial.
  void Update(const PreferenceRecord& record);
  void Set(const std::string& id, double rating) { ratings_[id] = rating; }

  const std::map<std::string, double>& ratings() const { return ratings_; }
  double k() const { return k_; }

 private:
  double k_;
  std::map<std::string, double> ratings_;
};

// Replays the history from fresh ratings, ordered by timestamp (stable for
// equal timestamps). Every id in `ids` appears in the output, unrated ones at
// kEloInitial.
std::map<std::string, double> RerateAll(const std::vector<PreferenceRecord>& history,
                                        const std::vector<std::string>& ids = {},
                                        double k = kEloK);

}  // namespace revo::fitness

#endif  // REVO_FITNESS_ELO_H_
