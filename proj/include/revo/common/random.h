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

#ifndef REVO_COMMON_RANDOM_H_
#define REVO_COMMON_RANDOM_H_

// Platform-stable random helpers. std::mt19937_64 output is fixed by the
// standard, but the std::*_distribution adaptors are not, so every draw that
// influences a persisted result goes through the functions below.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace revo {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
uint64_t Mix64(uint64_t x);

// Order-sensitive combination of seeds into one stream seed.
uint64_t MixSeed(std::initializer_list<uint64_t> parts);

// FNV-1a over bytes.
uint64_t Fnv1a64(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ULL);

// Uniform in [0, 1) with 53 bits of precision.
double UniformDouble(Rng& rng);

// Uniform in [lo, hi).
double UniformRange(Rng& rng, double lo, double hi);

// Uniform integer in [0, n). n must be > 0.
uint64_t UniformIndex(Rng& rng, uint64_t n);

// True with probability p; p <= 0 never, p >= 1 always.
bool Bernoulli(Rng& rng, double p);

// Index drawn proportionally to non-negative weights. Requires a positive sum.
size_t WeightedIndex(Rng& rng, std::span<const double> weights);

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& text);

}  // namespace revo

#endif  // REVO_COMMON_RANDOM_H_
