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

#ifndef REVO_DSL_AST_H_
#define REVO_DSL_AST_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revo::dsl {

enum class NodeKind {
  kConstant,
  kVariable,
  kParam,
  kComponent,  // only legal inside the combiner
  kUnary,
  kBinary,
  kClip,
  kSeriesStd,
  kSeriesMean,
  kCompare,
  kLogical,
  kNot,
  kConditional,
};

enum class Op {
  kNone,
  // unary
  kNeg,
  kExp,
  kAbs,
  kSqrt,  // sqrt(|x|)
  // binary
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMin,
  kMax,
  kPow,
  // comparison
  kLt,
  kLe,
  kGt,
  kGe,
  kEq,
  kNe,
  // logical
  kAnd,
  kOr,
};

std::string_view OpName(Op op);
Op OpFromName(std::string_view name);  // Op::kNone when unknown

struct Node;
using Expr = std::shared_ptr<const Node>;

// One AST node. `value` is used by constants, `name` by references, `args`
// by operators:
//   kUnary/kNot: [x]; kBinary/kCompare/kLogical: [a, b]; kClip: [x, lo, hi];
//   kSeriesStd/kSeriesMean: [variable]; kConditional: [predicate, then, else].
struct Node {
  NodeKind kind = NodeKind::kConstant;
  Op op = Op::kNone;
  double value = 0.0;
  std::string name;
  std::vector<Expr> args;
};

Expr MakeConstant(double value);
Expr MakeVariable(std::string name);
Expr MakeParam(std::string name);
Expr MakeComponentRef(std::string name);
Expr MakeUnary(Op op, Expr x);
Expr MakeBinary(Op op, Expr a, Expr b);
Expr MakeClip(Expr x, Expr lo, Expr hi);
Expr MakeSeriesStd(Expr variable);
Expr MakeSeriesMean(Expr variable);
Expr MakeCompare(Op op, Expr a, Expr b);
Expr MakeLogical(Op op, Expr a, Expr b);
Expr MakeNot(Expr x);
Expr MakeConditional(Expr predicate, Expr then_branch, Expr else_branch);

// True for nodes producing a truth value rather than a number.
bool IsPredicate(const Node& node);

// Structural equality; constants compare bitwise.
bool ExprEqual(const Expr& a, const Expr& b);

// Depth (a leaf has depth 1) and node count of one expression.
int ExprDepth(const Expr& e);
int ExprNodeCount(const Expr& e);

// Visits every node in pre-order.
template <typename Fn>
void VisitExpr(const Expr& e, Fn&& fn) {
  fn(*e);
  for (const Expr& a : e->args) VisitExpr(a, fn);
}

// Returns a copy of `e` with every node for which `replace` yields a non-null
// Expr substituted by it.
template <typename Fn>
Expr RewriteExpr(const Expr& e, Fn&& replace) {
  if (Expr r = replace(*e)) return r;
  bool changed = false;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const Expr& a : e->args) {
    args.push_back(RewriteExpr(a, replace));
    changed |= args.back() != a;
  }
  if (!changed) return e;
  auto copy = std::make_shared<Node>(*e);
  copy->args = std::move(args);
  return copy;
}

struct Component {
  std::string name;
  Expr expr;
};

struct Param {
  std::string name;
  double value = 0.0;
};

// A reward function: named components, named constants and an optional
// combiner. Without a combiner the total is the left-to-right sum of the
// components in declaration order.
struct RewardProgram {
  std::vector<Component> components;
  std::vector<Param> params;
  std::optional<Expr> combiner;

  const Component* FindComponent(std::string_view name) const;
  const Param* FindParam(std::string_view name) const;
  std::vector<std::string> ComponentNames() const;
};

bool StructurallyEqual(const RewardProgram& a, const RewardProgram& b);

// Params referenced by `e` (in first-reference order, deduplicated).
std::vector<std::string> ReferencedParams(const Expr& e);

}  // namespace revo::dsl

#endif  // REVO_DSL_AST_H_
