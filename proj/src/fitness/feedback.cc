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

#include "revo/fitness/feedback.h"

#include <algorithm>
#include <map>

#include "json.hpp"
#include "revo/common/error.h"
#include "revo/common/resources.h"

namespace revo::fitness {

std::string Tag::ToString() const {
  return aspect + (positive ? ": positive" : ": negative");
}

std::optional<Tag> ParseTag(std::string_view text) {
  size_t colon = text.rfind(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  std::string_view aspect = trim(text.substr(0, colon));
  std::string_view polarity = trim(text.substr(colon + 1));
  if (aspect.empty()) return std::nullopt;
  if (polarity == "positive") return Tag{std::string(aspect), true};
  if (polarity == "negative") return Tag{std::string(aspect), false};
  return std::nullopt;
}

bool TagVocabulary::Contains(std::string_view aspect) const {
  return std::find(aspects.begin(), aspects.end(), aspect) != aspects.end();
}

std::vector<std::string> TagVocabulary::AllTags() const {
  std::vector<std::string> out;
  for (const auto& a : aspects) {
    out.push_back(a + ": positive");
    out.push_back(a + ": negative");
  }
  return out;
}

TagVocabulary LoadTagVocabulary(const std::string& task) {
  auto j = nlohmann::json::parse(EmbeddedResource("data/tags/" + task + ".json"));
  TagVocabulary v;
  v.task = j.at("task").get<std::string>();
  v.aspects = j.at("aspects").get<std::vector<std::string>>();
  return v;
}

std::string ComposeFeedback(const std::vector<std::string>& tags) {
  std::vector<std::string> order;
  std::map<std::string, int> balance;
  for (const auto& text : tags) {
    std::optional<Tag> tag = ParseTag(text);
    if (!tag) continue;
    if (!balance.count(tag->aspect)) order.push_back(tag->aspect);
    balance[tag->aspect] += tag->positive ? 1 : -1;
  }
  std::string positives, negatives;
  for (const auto& aspect : order) {
    std::string& list = balance[aspect] > 0 ? positives : negatives;
    if (!list.empty()) list += ", ";
    list += aspect;
  }
  std::string out;
  if (!positives.empty()) out += "Positive: " + positives + ".";
  if (!negatives.empty()) {
    if (!out.empty()) out += " ";
    out += "Negative: " + negatives + ".";
  }
  return out;
}

std::vector<std::string> TagsFor(const std::vector<PreferenceRecord>& history,
                                 const std::string& individual) {
  std::vector<const PreferenceRecord*> ordered;
  for (const auto& r : history) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });
  std::vector<std::string> out;
  for (const auto* r : ordered) {
    if (r->individual_a == individual) out.insert(out.end(), r->tags_a.begin(), r->tags_a.end());
    if (r->individual_b == individual) out.insert(out.end(), r->tags_b.begin(), r->tags_b.end());
  }
  return out;
}

}  // namespace revo::fitness
