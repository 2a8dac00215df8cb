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

#include "revo/evolution/exact_mean.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace revo::evolution {
namespace {

// Non-overlapping partial sums whose exact total is the running sum
// (Shewchuk's grow-expansion, as in Python's math.fsum).
class Expansion {
 public:
  void Add(double x) {
    size_t i = 0;
    for (double y : partials_) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      double hi = x + y;
      double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  // Adds a * b exactly.
  void AddProduct(double a, double b) {
    double p = a * b;
    Add(p);
    Add(std::fma(a, b, -p));
  }

  // Sign of the exact total: the largest-magnitude nonzero partial wins.
  int Sign() const {
    for (auto it = partials_.rbegin(); it != partials_.rend(); ++it)
      if (*it != 0.0) return *it > 0.0 ? 1 : -1;
    return 0;
  }

  double Approx() const {
    double s = 0.0;
    for (double p : partials_) s += p;
    return s;
  }

  const std::vector<double>& partials() const { return partials_; }

 private:
  std::vector<double> partials_;
};

Expansion Sum(std::span<const double> values) {
  Expansion e;
  for (double v : values) e.Add(v);
  return e;
}

// Sign of sum - q * n.
int SignOfRemainder(const Expansion& sum, double q, double n) {
  Expansion r = sum;
  r.AddProduct(-q, n);
  return r.Sign();
}

// Sign of sum - (a + b) / 2 * n, i.e. of 2 * sum - a * n - b * n.
int SignAgainstMidpoint(const Expansion& sum, double a, double b, double n) {
  Expansion r;
  for (double p : sum.partials()) r.Add(2.0 * p);
  r.AddProduct(-a, n);
  r.AddProduct(-b, n);
  return r.Sign();
}

bool EvenMantissa(double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  return (bits & 1) == 0;
}

}  // namespace

std::optional<double> ExactMean(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  const double n = static_cast<double>(values.size());
  Expansion sum = Sum(values);
  double q = sum.Approx() / n;
  // q starts within a few ulps; walk toward the exact quotient.
  while (true) {
    int d = SignOfRemainder(sum, q, n);
    if (d == 0) return q;
    double next = std::nextafter(q, d > 0 ? INFINITY : -INFINITY);
    int m = SignAgainstMidpoint(sum, q, next, n);
    if (m == 0) return EvenMantissa(q) ? q : next;
    // Past the midpoint (in the direction of travel) the neighbour is closer.
    if ((d > 0 && m > 0) || (d < 0 && m < 0)) {
      q = next;
      continue;
    }
    return q;
  }
}

int CompareToMean(double x, std::span<const double> values) {
  Expansion r;
  r.AddProduct(x, static_cast<double>(values.size()));
  for (double v : values) r.Add(-v);
  return r.Sign();
}

}  // namespace revo::evolution
