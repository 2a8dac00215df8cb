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

#ifndef REVO_DSL_DIFF_H_
#define REVO_DSL_DIFF_H_

#include <string>
#include <vector>

#include "revo/dsl/ast.h"

namespace revo::dsl {

// Component names partitioned by how `b` differs from `a`. Names keep the
// declaration order of the program they come from (`a` for removed,
// modified and unchanged; `b` for added).
struct ComponentDiff {
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::vector<std::string> modified;
  std::vector<std::string> unchanged;

  size_t ChangeCount() const { return added.size() + removed.size() + modified.size(); }
};

// A component is modified when its expression differs structurally or when a
// param it references has a different value (or is missing) in `b`.
ComponentDiff DiffComponents(const RewardProgram& a, const RewardProgram& b);

}  // namespace revo::dsl

#endif  // REVO_DSL_DIFF_H_
