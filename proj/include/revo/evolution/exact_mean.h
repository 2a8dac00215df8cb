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

#ifndef REVO_EVOLUTION_EXACT_MEAN_H_
#define REVO_EVOLUTION_EXACT_MEAN_H_

// Exact arithmetic for island means. Selection admits a candidate when its
// fitness reaches the island mean; doing the comparison exactly and rounding
// the reported mean correctly makes "inserting x >= mean never lowers the
// mean" hold bit-for-bit, not just up to rounding. Inputs must be finite and
// small enough that n * |x| does not overflow.

#include <optional>
#include <span>

namespace revo::evolution {

// Correctly rounded (ties to even) arithmetic mean; nullopt when empty.
std::optional<double> ExactMean(std::span<const double> values);

// Sign of x - mean(values), computed exactly. values must be non-empty.
int CompareToMean(double x, std::span<const double> values);

}  // namespace revo::evolution

#endif  // REVO_EVOLUTION_EXACT_MEAN_H_
