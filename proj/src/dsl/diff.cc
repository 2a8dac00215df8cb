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

#include "revo/dsl/diff.h"

#include <bit>
#include <cstdint>

namespace revo::dsl {
namespace {

bool SameParamValues(const Expr& e, const RewardProgram& a, const RewardProgram& b) {
  for (const std::string& name : ReferencedParams(e)) {
    const Param* pa = a.FindParam(name);
    const Param* pb = b.FindParam(name);
    if (!pa || !pb) {
      if (pa != pb) return false;
      continue;
    }
    if (std::bit_cast<uint64_t>(pa->value) != std::bit_cast<uint64_t>(pb->value)) return false;
  }
  return true;
}

}  // namespace

ComponentDiff DiffComponents(const RewardProgram& a, const RewardProgram& b) {
  ComponentDiff diff;
  for (const Component& ca : a.components) {
    const Component* cb = b.FindComponent(ca.name);
    if (!cb) {
      diff.removed.push_back(ca.name);
    } else if (!ExprEqual(ca.expr, cb->expr) || !SameParamValues(ca.expr, a, b)) {
      diff.modified.push_back(ca.name);
    } else {
      diff.unchanged.push_back(ca.name);
    }
  }
  for (const Component& cb : b.components) {
    if (!a.FindComponent(cb.name)) diff.added.push_back(cb.name);
  }
  return diff;
}

}  // namespace revo::dsl
