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

// Seeded random reward programs for property tests.

#ifndef REVO_TESTS_PROGRAM_GEN_H_
#define REVO_TESTS_PROGRAM_GEN_H_

#include <string>
#include <vector>

#include "revo/common/random.h"
#include "revo/dsl/ast.h"
#include "revo/dsl/schema.h"

namespace revo::testing {

inline dsl::EnvSchema TestDriveSchema() {
  using dsl::VarKind;
  return dsl::EnvSchema("test_drive", {
                                          {"curr_x", VarKind::kScalar, "m", ""},
                                          {"curr_y", VarKind::kScalar, "m", ""},
                                          {"speed", VarKind::kScalar, "m/s", ""},
                                          {"collision", VarKind::kFlag, "", ""},
                                          {"min_pos", VarKind::kScalar, "m", ""},
                                          {"distance", VarKind::kScalar, "m", ""},
                                          {"action_list", VarKind::kSeries, "", ""},
                                      });
}

class ProgramGenerator {
 public:
  ProgramGenerator(const dsl::EnvSchema& schema, uint64_t seed) : schema_(schema), rng_(seed) {
    for (const auto& v : schema.variables()) {
      (v.kind == dsl::VarKind::kSeries ? series_ : scalars_).push_back(v.name);
    }
  }

  dsl::RewardProgram Program() {
    dsl::RewardProgram p;
    used_.clear();
    int n = 1 + static_cast<int>(UniformIndex(rng_, 4));
    for (int i = 0; i < n; ++i) {
      p.components.push_back({"c" + std::to_string(i), Number(1 + UniformIndex(rng_, 5), false)});
    }
    if (Bernoulli(rng_, 0.5)) {
      components_ = n;
      p.combiner = Number(1 + UniformIndex(rng_, 3), true);
      components_ = 0;
    }
    for (const std::string& name : used_) {
      p.params.push_back({name, Constant()});
    }
    return p;
  }

  dsl::StateVector State() {
    dsl::StateVector s(schema_.size());
    for (size_t i = 0; i < schema_.size(); ++i) {
      const auto& v = schema_.variables()[i];
      if (v.kind == dsl::VarKind::kFlag) {
        s.scalars[i] = Bernoulli(rng_, 0.5) ? 1.0 : 0.0;
      } else if (v.kind == dsl::VarKind::kSeries) {
        size_t len = UniformIndex(rng_, 5);
        for (size_t k = 0; k < len; ++k) s.series[i].push_back(UniformRange(rng_, -1.0, 1.0));
      } else {
        s.scalars[i] = Bernoulli(rng_, 0.1) ? 0.0 : UniformRange(rng_, -20.0, 20.0);
      }
    }
    return s;
  }

  Rng& rng() { return rng_; }

 private:
  double Constant() {
    switch (UniformIndex(rng_, 4)) {
      case 0:
        return static_cast<double>(UniformIndex(rng_, 10));
      case 1:
        return -UniformRange(rng_, 0.0, 5.0);
      case 2:
        return 0.1 * static_cast<double>(UniformIndex(rng_, 30));
      default:
        return UniformRange(rng_, -3.0, 3.0);
    }
  }

  dsl::Expr Leaf(bool combiner) {
    size_t pick = UniformIndex(rng_, combiner && components_ > 0 ? 4 : 3);
    if (pick == 0) return dsl::MakeConstant(Constant());
    if (pick == 1) {
      return dsl::MakeVariable(scalars_[UniformIndex(rng_, scalars_.size())]);
    }
    if (pick == 2) {
      std::string name = "p" + std::to_string(UniformIndex(rng_, 4));
      bool seen = false;
      for (const auto& u : used_) seen |= u == name;
      if (!seen) used_.push_back(name);
      return dsl::MakeParam(name);
    }
    return dsl::MakeComponentRef("c" + std::to_string(UniformIndex(rng_, components_)));
  }

  dsl::Expr Predicate(size_t depth, bool combiner) {
    using dsl::Op;
    size_t d = depth > 1 ? depth - 1 : 1;
    switch (depth <= 1 ? 0 : UniformIndex(rng_, 4)) {
      case 0: {
        static const Op kCmp[] = {Op::kLt, Op::kLe, Op::kGt, Op::kGe, Op::kEq, Op::kNe};
        return dsl::MakeCompare(kCmp[UniformIndex(rng_, 6)], Number(depth, combiner),
                                Number(depth, combiner));
      }
      case 1:
        return dsl::MakeLogical(Bernoulli(rng_, 0.5) ? Op::kAnd : Op::kOr,
                                Predicate(d, combiner), Predicate(d, combiner));
      case 2:
        return dsl::MakeNot(Predicate(d, combiner));
      default:
        return Number(depth, combiner);
    }
  }

  dsl::Expr Number(size_t depth, bool combiner) {
    using dsl::Op;
    if (depth <= 1) return Leaf(combiner);
    size_t d = depth - 1;
    switch (UniformIndex(rng_, 7)) {
      case 0: {
        static const Op kUnary[] = {Op::kNeg, Op::kExp, Op::kAbs, Op::kSqrt};
        Op op = kUnary[UniformIndex(rng_, 4)];
        dsl::Expr x = Number(d, combiner);
        if (op == Op::kExp) x = dsl::MakeClip(x, dsl::MakeConstant(-5), dsl::MakeConstant(5));
        return dsl::MakeUnary(op, x);
      }
      case 1:
      case 2: {
        static const Op kBinary[] = {Op::kAdd, Op::kSub, Op::kMul, Op::kDiv,
                                     Op::kMin, Op::kMax, Op::kPow};
        Op op = kBinary[UniformIndex(rng_, 7)];
        if (op == Op::kPow) {
          return dsl::MakeBinary(op, Number(d, combiner),
                                 dsl::MakeConstant(static_cast<double>(UniformIndex(rng_, 4)) - 1));
        }
        return dsl::MakeBinary(op, Number(d, combiner), Number(d, combiner));
      }
      case 3:
        return dsl::MakeClip(Number(d, combiner), Number(d, combiner), Number(d, combiner));
      case 4:
        if (!series_.empty()) {
          dsl::Expr var = dsl::MakeVariable(series_[UniformIndex(rng_, series_.size())]);
          return Bernoulli(rng_, 0.5) ? dsl::MakeSeriesStd(var) : dsl::MakeSeriesMean(var);
        }
        return Leaf(combiner);
      case 5:
        return dsl::MakeConditional(Predicate(d, combiner), Number(d, combiner),
                                    Number(d, combiner));
      default:
        return Leaf(combiner);
    }
  }

  const dsl::EnvSchema& schema_;
  Rng rng_;
  std::vector<std::string> scalars_;
  std::vector<std::string> series_;
  std::vector<std::string> used_;
  size_t components_ = 0;
};

}  // namespace revo::testing

#endif  // REVO_TESTS_PROGRAM_GEN_H_
