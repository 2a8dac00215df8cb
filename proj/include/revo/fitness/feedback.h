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

#ifndef REVO_FITNESS_FEEDBACK_H_
#define REVO_FITNESS_FEEDBACK_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revo/fitness/elo.h"

namespace revo::fitness {

// One checkbox tag, written "aspect: positive" or "aspect: negative".
struct Tag {
  std::string aspect;
  bool positive = false;

  std::string ToString() const;
};

std::optional<Tag> ParseTag(std::string_view text);

// Per-task checkbox aspects, loaded from data/tags/<task>.json.
struct TagVocabulary {
  std::string task;
  std::vector<std::string> aspects;

  bool Contains(std::string_view aspect) const;
  // All "aspect: positive|negative" strings, aspects in file order.
  std::vector<std::string> AllTags() const;
};

// Throws ConfigError for an unknown task.
TagVocabulary LoadTagVocabulary(const std::string& task);

// Aggregates tags by aspect (first-appearance order). The majority polarity
// wins and ties count as negative. Returns
//   "Positive: a, b. Negative: c."
// omitting an empty half, or "" when there are no tags.
std::string ComposeFeedback(const std::vector<std::string>& tags);

// Tags attached to `individual` across the history, in timestamp order.
std::vector<std::string> TagsFor(const std::vector<PreferenceRecord>& history,
                                 const std::string& individual);

}  // namespace revo::fitness

#endif  // REVO_FITNESS_FEEDBACK_H_
