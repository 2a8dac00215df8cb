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

#include <set>
#include <stdexcept>

#include "doctest.h"
#include "revo/common/error.h"
#include "revo/common/random.h"
#include "revo/common/resources.h"

namespace revo {
namespace {

TEST_CASE("mt19937_64 reference output") {
  // 10000th output for the default seed is fixed by the C++ standard.
  Rng rng;
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ULL);
}

TEST_CASE("MixSeed is order sensitive and stable") {
  CHECK(MixSeed({1, 2}) != MixSeed({2, 1}));
  CHECK(MixSeed({1, 2}) == MixSeed({1, 2}));
  CHECK(Mix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("Fnv1a64 known vectors") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(Fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("UniformIndex stays in range and covers it") {
  Rng rng(5);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = UniformIndex(rng, 7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("UniformDouble in [0, 1)") {
  Rng rng(11);
  double lo = 1, hi = 0;
  for (int i = 0; i < 10000; ++i) {
    double u = UniformDouble(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("WeightedIndex frequencies follow weights") {
  Rng rng(3);
  std::vector<double> w = {1.0, 0.0, 3.0};
  int counts[3] = {0, 0, 0};
  const int n = 40000;
  for (int i = 0; i < n; ++i) counts[WeightedIndex(rng, w)]++;
  CHECK(counts[1] == 0);
  // Binomial standard error for p = 0.25 at n = 40000 is ~0.0022; 5 sigma.
  CHECK(static_cast<double>(counts[0]) / n == doctest::Approx(0.25).epsilon(0.011 / 0.25));
  std::vector<double> zero = {0.0, 0.0};
  CHECK_THROWS_AS(WeightedIndex(rng, zero), std::invalid_argument);
  std::vector<double> negative = {1.0, -1.0};
  CHECK_THROWS_AS(WeightedIndex(rng, negative), std::invalid_argument);
}

TEST_CASE("Shuffle is a permutation") {
  Rng rng(9);
  std::vector<int> v = {0, 1, 2, 3, 4, 5, 6, 7};
  Shuffle(v, rng);
  std::multiset<int> s(v.begin(), v.end());
  CHECK(s == std::multiset<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("Rng serialization round trip") {
  Rng rng(42);
  rng.discard(17);
  Rng copy = DeserializeRng(SerializeRng(rng));
  for (int i = 0; i < 10; ++i) CHECK(copy() == rng());
  CHECK_THROWS_AS(DeserializeRng("garbage"), CheckpointError);
}

TEST_CASE("WriteFileAtomic then ReadFile") {
  auto dir = std::filesystem::temp_directory_path() / "revo_common_test";
  std::filesystem::remove_all(dir);
  WriteFileAtomic(dir / "a" / "b.txt", "hello");
  CHECK(ReadFile(dir / "a" / "b.txt") == "hello");
  WriteFileAtomic(dir / "a" / "b.txt", "bye");
  CHECK(ReadFile(dir / "a" / "b.txt") == "bye");
  CHECK_FALSE(std::filesystem::exists(dir / "a" / "b.txt.tmp"));
  CHECK_THROWS_AS(ReadFile(dir / "missing"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown embedded resource") {
  CHECK_THROWS_AS(EmbeddedResource("nope/none.txt"), ConfigError);
}

}  // namespace
}  // namespace revo
