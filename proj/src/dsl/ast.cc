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

#include "revo/dsl/ast.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <utility>

namespace revo::dsl {
namespace {

constexpr std::pair<Op, std::string_view> kOpNames[] = {
    {Op::kNeg, "neg"}, {Op::kExp, "exp"}, {Op::kAbs, "abs"}, {Op::kSqrt, "sqrt"},
    {Op::kAdd, "add"}, {Op::kSub, "sub"}, {Op::kMul, "mul"}, {Op::kDiv, "div"},
    {Op::kMin, "min"}, {Op::kMax, "max"}, {Op::kPow, "pow"}, {Op::kLt, "lt"},
    {Op::kLe, "le"},   {Op::kGt, "gt"},   {Op::kGe, "ge"},   {Op::kEq, "eq"},
    {Op::kNe, "ne"},   {Op::kAnd, "and"}, {Op::kOr, "or"},
};

Expr MakeNode(NodeKind kind, Op op, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->op = op;
  n->args = std::move(args);
  return n;
}

Expr MakeNamed(NodeKind kind, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->name = std::move(name);
  return n;
}

}  // namespace

std::string_view OpName(Op op) {
  for (const auto& [o, name] : kOpNames) {
    if (o == op) return name;
  }
  return "none";
}

Op OpFromName(std::string_view name) {
  for (const auto& [o, n] : kOpNames) {
    if (n == name) return o;
  }
  return Op::kNone;
}

Expr MakeConstant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kConstant;
  n->value = value;
  return n;
}

Expr MakeVariable(std::string name) { return MakeNamed(NodeKind::kVariable, std::move(name)); }
Expr MakeParam(std::string name) { return MakeNamed(NodeKind::kParam, std::move(name)); }
Expr MakeComponentRef(std::string name) {
  return MakeNamed(NodeKind::kComponent, std::move(name));
}
Expr MakeUnary(Op op, Expr x) { return MakeNode(NodeKind::kUnary, op, {std::move(x)}); }
Expr MakeBinary(Op op, Expr a, Expr b) {
  return MakeNode(NodeKind::kBinary, op, {std::move(a), std::move(b)});
}
Expr MakeClip(Expr x, Expr lo, Expr hi) {
  return MakeNode(NodeKind::kClip, Op::kNone, {std::move(x), std::move(lo), std::move(hi)});
}
Expr MakeSeriesStd(Expr variable) {
  return MakeNode(NodeKind::kSeriesStd, Op::kNone, {std::move(variable)});
}
Expr MakeSeriesMean(Expr variable) {
  return MakeNode(NodeKind::kSeriesMean, Op::kNone, {std::move(variable)});
}
Expr MakeCompare(Op op, Expr a, Expr b) {
  return MakeNode(NodeKind::kCompare, op, {std::move(a), std::move(b)});
}
Expr MakeLogical(Op op, Expr a, Expr b) {
  return MakeNode(NodeKind::kLogical, op, {std::move(a), std::move(b)});
}
Expr MakeNot(Expr x) { return MakeNode(NodeKind::kNot, Op::kNone, {std::move(x)}); }
Expr MakeConditional(Expr predicate, Expr then_branch, Expr else_branch) {
  return MakeNode(NodeKind::kConditional, Op::kNone,
                  {std::move(predicate), std::move(then_branch), std::move(else_branch)});
}

bool IsPredicate(const Node& node) {
  return node.kind == NodeKind::kCompare || node.kind == NodeKind::kLogical ||
         node.kind == NodeKind::kNot;
}

bool ExprEqual(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->op != b->op || a->name != b->name) return false;
  if (std::bit_cast<uint64_t>(a->value) != std::bit_cast<uint64_t>(b->value)) return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!ExprEqual(a->args[i], b->args[i])) return false;
  }
  return true;
}

int ExprDepth(const Expr& e) {
  int deepest = 0;
  for (const Expr& a : e->args) deepest = std::max(deepest, ExprDepth(a));
  return deepest + 1;
}

int ExprNodeCount(const Expr& e) {
  int n = 1;
  for (const Expr& a : e->args) n += ExprNodeCount(a);
  return n;
}

const Component* RewardProgram::FindComponent(std::string_view name) const {
  for (const auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Param* RewardProgram::FindParam(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<std::string> RewardProgram::ComponentNames() const {
  std::vector<std::string> names;
  names.reserve(components.size());
  for (const auto& c : components) names.push_back(c.name);
  return names;
}

bool StructurallyEqual(const RewardProgram& a, const RewardProgram& b) {
  if (a.components.size() != b.components.size() || a.params.size() != b.params.size()) {
    return false;
  }
  for (size_t i = 0; i < a.components.size(); ++i) {
    if (a.components[i].name != b.components[i].name) return false;
    if (!ExprEqual(a.components[i].expr, b.components[i].expr)) return false;
  }
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name) return false;
    if (std::bit_cast<uint64_t>(a.params[i].value) != std::bit_cast<uint64_t>(b.params[i].value)) {
      return false;
    }
  }
  if (a.combiner.has_value() != b.combiner.has_value()) return false;
  return !a.combiner || ExprEqual(*a.combiner, *b.combiner);
}

std::vector<std::string> ReferencedParams(const Expr& e) {
  std::vector<std::string> names;
  VisitExpr(e, [&](const Node& n) {
    if (n.kind == NodeKind::kParam &&
        std::find(names.begin(), names.end(), n.name) == names.end()) {
      names.push_back(n.name);
    }
  });
  return names;
}

}  // namespace revo::dsl
