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

#include "revo/dsl/validate.h"

#include <cmath>
#include <set>
#include <sstream>

#include "revo/dsl/parser.h"

namespace revo::dsl {
namespace {

class Checker {
 public:
  Checker(const RewardProgram& program, const EnvSchema& schema, ValidationReport& report)
      : program_(program), schema_(schema), report_(report) {
    for (const auto& p : program.params) params_.insert(p.name);
    for (const auto& c : program.components) components_.insert(c.name);
  }

  void Run() {
    if (program_.components.empty()) Add(FindingKind::kNoComponents, "", "");
    CheckDeclarations();
    int total_nodes = 0;
    for (const auto& c : program_.components) {
      CheckExpr(c.expr, c.name, /*combiner=*/false, /*predicate_ok=*/false);
      CheckSize(c.expr, c.name);
      total_nodes += ExprNodeCount(c.expr);
    }
    if (program_.combiner) {
      CheckExpr(*program_.combiner, "total", /*combiner=*/true, /*predicate_ok=*/false);
      CheckSize(*program_.combiner, "total");
      total_nodes += ExprNodeCount(*program_.combiner);
    }
    if (total_nodes > kMaxProgramNodes) {
      Finding f{FindingKind::kNodeCountExceeded, "", "program", total_nodes, kMaxProgramNodes};
      report_.findings.push_back(f);
    }
    for (const auto& p : program_.params) {
      if (!used_params_.count(p.name)) Add(FindingKind::kUnusedParam, p.name, "");
    }
  }

 private:
  void Add(FindingKind kind, std::string subject, std::string where) {
    report_.findings.push_back({kind, std::move(subject), std::move(where), 0, 0});
  }

  void CheckDeclarations() {
    std::set<std::string, std::less<>> seen;
    for (const auto& c : program_.components) {
      if (!seen.insert(c.name).second) Add(FindingKind::kDuplicateComponent, c.name, "");
    }
    seen.clear();
    for (const auto& p : program_.params) {
      if (!seen.insert(p.name).second) Add(FindingKind::kDuplicateParam, p.name, "");
      if (!std::isfinite(p.value)) Add(FindingKind::kNonFiniteParam, p.name, "");
      if (schema_.Find(p.name)) Add(FindingKind::kNameConflict, p.name, "");
      if (components_.count(p.name)) Add(FindingKind::kNameConflict, p.name, "");
    }
  }

  void CheckSize(const Expr& e, const std::string& where) {
    int depth = ExprDepth(e);
    if (depth > kMaxExprDepth) {
      report_.findings.push_back({FindingKind::kDepthExceeded, "", where, depth, kMaxExprDepth});
    }
  }

  void CheckExpr(const Expr& e, const std::string& where, bool combiner, bool predicate_ok) {
    const Node& n = *e;
    if (IsPredicate(n) && !predicate_ok) {
      Add(FindingKind::kTypeError, "condition used as a number", where);
    }
    switch (n.kind) {
      case NodeKind::kConstant:
        if (!std::isfinite(n.value)) Add(FindingKind::kTypeError, "non-finite constant", where);
        return;
      case NodeKind::kVariable: {
        const VariableSpec* spec = schema_.Find(n.name);
        if (!spec) {
          Add(FindingKind::kUnboundName, n.name, where);
        } else if (spec->kind == VarKind::kSeries) {
          Add(FindingKind::kKindMismatch, n.name, where);
        }
        return;
      }
      case NodeKind::kParam:
        used_params_.insert(n.name);
        if (!params_.count(n.name)) Add(FindingKind::kUndeclaredParam, n.name, where);
        return;
      case NodeKind::kComponent:
        if (!combiner) Add(FindingKind::kComponentRefOutsideCombiner, n.name, where);
        if (!components_.count(n.name)) Add(FindingKind::kUnknownComponent, n.name, where);
        return;
      case NodeKind::kSeriesStd:
      case NodeKind::kSeriesMean: {
        const Node& arg = *n.args.at(0);
        if (arg.kind != NodeKind::kVariable) {
          Add(FindingKind::kKindMismatch, arg.name, where);
          if (arg.kind == NodeKind::kParam) used_params_.insert(arg.name);
          return;
        }
        const VariableSpec* spec = schema_.Find(arg.name);
        if (!spec) {
          Add(FindingKind::kUnboundName, arg.name, where);
        } else if (spec->kind != VarKind::kSeries) {
          Add(FindingKind::kKindMismatch, arg.name, where);
        }
        return;
      }
      case NodeKind::kConditional:
        CheckExpr(n.args.at(0), where, combiner, /*predicate_ok=*/true);
        CheckExpr(n.args.at(1), where, combiner, false);
        CheckExpr(n.args.at(2), where, combiner, false);
        return;
      case NodeKind::kLogical:
      case NodeKind::kNot:
        for (const Expr& a : n.args) CheckExpr(a, where, combiner, /*predicate_ok=*/true);
        return;
      default:
        for (const Expr& a : n.args) CheckExpr(a, where, combiner, false);
        return;
    }
  }

  const RewardProgram& program_;
  const EnvSchema& schema_;
  ValidationReport& report_;
  std::set<std::string, std::less<>> params_;
  std::set<std::string, std::less<>> components_;
  std::set<std::string, std::less<>> used_params_;
};

}  // namespace

std::string_view FindingKindName(FindingKind kind) {
  switch (kind) {
    case FindingKind::kNoComponents:
      return "NoComponents";
    case FindingKind::kDuplicateComponent:
      return "DuplicateComponent";
    case FindingKind::kDuplicateParam:
      return "DuplicateParam";
    case FindingKind::kUnboundName:
      return "UnboundName";
    case FindingKind::kUnusedParam:
      return "UnusedParam";
    case FindingKind::kUndeclaredParam:
      return "UndeclaredParam";
    case FindingKind::kNonFiniteParam:
      return "NonFiniteParam";
    case FindingKind::kNameConflict:
      return "NameConflict";
    case FindingKind::kKindMismatch:
      return "KindMismatch";
    case FindingKind::kComponentRefOutsideCombiner:
      return "ComponentRefOutsideCombiner";
    case FindingKind::kUnknownComponent:
      return "UnknownComponent";
    case FindingKind::kTypeError:
      return "TypeError";
    case FindingKind::kDepthExceeded:
      return "DepthExceeded";
    case FindingKind::kNodeCountExceeded:
      return "NodeCountExceeded";
  }
  return "Unknown";
}

std::string Finding::Describe() const {
  std::ostringstream out;
  out << FindingKindName(kind);
  if (kind == FindingKind::kDepthExceeded || kind == FindingKind::kNodeCountExceeded) {
    out << "(" << value << ", limit " << limit << ")";
  }
  if (!subject.empty()) out << " '" << subject << "'";
  if (!where.empty()) out << " in " << where;
  return out.str();
}

bool ValidationReport::Has(FindingKind kind) const {
  for (const auto& f : findings) {
    if (f.kind == kind) return true;
  }
  return false;
}

std::string ValidationReport::Describe() const {
  std::string out;
  for (const auto& f : findings) {
    if (!out.empty()) out += "; ";
    out += f.Describe();
  }
  return out;
}

ValidationError::ValidationError(ValidationReport report)
    : Error("invalid reward program: " + report.Describe()), report_(std::move(report)) {}

ValidationReport Validate(const RewardProgram& program, const EnvSchema& schema) {
  ValidationReport report;
  Checker(program, schema, report).Run();
  return report;
}

RewardProgram ParseAndValidate(std::string_view source, const EnvSchema& schema) {
  RewardProgram program = Parse(source);
  ValidationReport report = Validate(program, schema);
  if (!report.ok()) throw ValidationError(std::move(report));
  return program;
}

}  // namespace revo::dsl
