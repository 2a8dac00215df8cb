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

// Arithmetic shared by the tree-walking and compiled evaluators. Both routes
// must produce bit-identical results, so every operator lives here once.

#ifndef REVO_SRC_DSL_ARITH_H_
#define REVO_SRC_DSL_ARITH_H_

#include <cmath>
#include <vector>

#include "revo/dsl/ast.h"

namespace revo::dsl::arith {

inline bool Truthy(double x) { return x != 0.0; }

inline double Unary(Op op, double x) {
  switch (op) {
    case Op::kNeg:
      return -x;
    case Op::kExp:
      return std::exp(x);
    case Op::kAbs:
      return std::fabs(x);
    case Op::kSqrt:
      return std::sqrt(std::fabs(x));
    default:
      return 0.0;
  }
}

// Division by zero, 0^negative and pow domain errors yield 0 and raise
// `degenerate`.
inline double Binary(Op op, double a, double b, bool& degenerate) {
  switch (op) {
    case Op::kAdd:
      return a + b;
    case Op::kSub:
      return a - b;
    case Op::kMul:
      return a * b;
    case Op::kDiv:
      if (b == 0.0) {
        degenerate = true;
        return 0.0;
      }
      return a / b;
    case Op::kMin:
      return b < a ? b : a;
    case Op::kMax:
      return a < b ? b : a;
    case Op::kPow: {
      if (a == 0.0 && b < 0.0) {
        degenerate = true;
        return 0.0;
      }
      double r = std::pow(a, b);
      if (std::isnan(r) && !std::isnan(a) && !std::isnan(b)) {
        degenerate = true;
        return 0.0;
      }
      return r;
    }
    default:
      return 0.0;
  }
}

inline bool Compare(Op op, double a, double b) {
  switch (op) {
    case Op::kLt:
      return a < b;
    case Op::kLe:
      return a <= b;
    case Op::kGt:
      return a > b;
    case Op::kGe:
      return a >= b;
    case Op::kEq:
      return a == b;
    case Op::kNe:
      return a != b;
    default:
      return false;
  }
}

inline double Clip(double x, double lo, double hi) {
  double r = x < lo ? lo : x;
  return hi < r ? hi : r;
}

inline double SeriesMean(const std::vector<double>& s) {
  if (s.empty()) return 0.0;
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

// Population standard deviation; 0 for fewer than two samples.
inline double SeriesStd(const std::vector<double>& s) {
  if (s.size() < 2) return 0.0;
  double mean = SeriesMean(s);
  double acc = 0.0;
  for (double v : s) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(s.size()));
}

}  // namespace revo::dsl::arith

#endif  // REVO_SRC_DSL_ARITH_H_
