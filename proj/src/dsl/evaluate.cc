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

#include "revo/dsl/evaluate.h"

#include <cmath>

#include "arith.h"
#include "revo/dsl/validate.h"

namespace revo::dsl {

MissingBinding::MissingBinding(std::string variable)
    : Error("missing binding for variable '" + variable + "'"), variable_(std::move(variable)) {}

NonFiniteResult::NonFiniteResult(std::string where)
    : Error("non-finite reward value in " + where), where_(std::move(where)) {}

namespace {

class Interpreter {
 public:
  Interpreter(const RewardProgram& program, const State& state, RewardOutput& out)
      : program_(program), state_(state), out_(out) {}

  double Number(const Node& n) {
    switch (n.kind) {
      case NodeKind::kConstant:
        return n.value;
      case NodeKind::kVariable:
        return Scalar(n.name);
      case NodeKind::kParam: {
        const Param* p = program_.FindParam(n.name);
        if (!p) throw Error("undeclared param '" + n.name + "'");
        return p->value;
      }
      case NodeKind::kComponent: {
        auto it = out_.components.find(n.name);
        if (it == out_.components.end()) throw Error("unknown component '" + n.name + "'");
        return it->second;
      }
      case NodeKind::kUnary:
        return arith::Unary(n.op, Number(*n.args[0]));
      case NodeKind::kBinary: {
        double a = Number(*n.args[0]);
        double b = Number(*n.args[1]);
        return arith::Binary(n.op, a, b, out_.degenerate);
      }
      case NodeKind::kClip: {
        double x = Number(*n.args[0]);
        double lo = Number(*n.args[1]);
        double hi = Number(*n.args[2]);
        return arith::Clip(x, lo, hi);
      }
      case NodeKind::kSeriesStd:
        return arith::SeriesStd(Series(n.args[0]->name));
      case NodeKind::kSeriesMean:
        return arith::SeriesMean(Series(n.args[0]->name));
      case NodeKind::kConditional:
        return Condition(*n.args[0]) ? Number(*n.args[1]) : Number(*n.args[2]);
      case NodeKind::kCompare:
      case NodeKind::kLogical:
      case NodeKind::kNot:
        return Condition(n) ? 1.0 : 0.0;
    }
    return 0.0;
  }

  bool Condition(const Node& n) {
    switch (n.kind) {
      case NodeKind::kCompare: {
        double a = Number(*n.args[0]);
        double b = Number(*n.args[1]);
        return arith::Compare(n.op, a, b);
      }
      case NodeKind::kLogical:
        if (n.op == Op::kAnd) return Condition(*n.args[0]) && Condition(*n.args[1]);
        return Condition(*n.args[0]) || Condition(*n.args[1]);
      case NodeKind::kNot:
        return !Condition(*n.args[0]);
      default:
        return arith::Truthy(Number(n));
    }
  }

 private:
  const Value& Lookup(const std::string& name) {
    auto it = state_.find(name);
    if (it == state_.end()) throw MissingBinding(name);
    return it->second;
  }

  double Scalar(const std::string& name) {
    const Value& v = Lookup(name);
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw MissingBinding(name);
  }

  const std::vector<double>& Series(const std::string& name) {
    const Value& v = Lookup(name);
    if (const auto* s = std::get_if<std::vector<double>>(&v)) return *s;
    throw MissingBinding(name);
  }

  const RewardProgram& program_;
  const State& state_;
  RewardOutput& out_;
};

}  // namespace

RewardOutput Evaluate(const RewardProgram& program, const State& state) {
  RewardOutput out;
  Interpreter interp(program, state, out);
  for (const Component& c : program.components) {
    double v = interp.Number(*c.expr);
    if (!std::isfinite(v)) throw NonFiniteResult(c.name);
    out.components[c.name] = v;
  }
  if (program.combiner) {
    out.total = interp.Number(**program.combiner);
  } else {
    bool first = true;
    for (const Component& c : program.components) {
      double v = out.components[c.name];
      out.total = first ? v : out.total + v;
      first = false;
    }
  }
  if (!std::isfinite(out.total)) throw NonFiniteResult("total");
  return out;
}

// ---------------------------------------------------------------------------
// Compiled form: a small stack machine. Conditionals and and/or keep the lazy
// semantics of the interpreter through jumps.

namespace {

enum class Code : unsigned char {
  kConst,      // push constants[arg]
  kScalar,     // push state.scalars[arg]
  kComponent,  // push components[arg]
  kUnary,      // op
  kBinary,     // op
  kClip,
  kStd,        // series slot arg
  kMean,
  kCompare,    // op, pushes 1/0
  kNot,        // pushes 1 if top is zero else 0
  kTruthy,     // normalizes top to 1/0
  kJumpIfZero,     // pops; jumps to arg when zero
  kJumpIfNonZero,  // pops; jumps to arg when non-zero
  kJump,
};

struct Instr {
  Code code;
  Op op = Op::kNone;
  unsigned arg = 0;
};

struct Routine {
  std::vector<Instr> code;
};

}  // namespace

struct CompiledProgram::Impl {
  std::vector<std::string> names;
  std::vector<double> constants;
  std::vector<Routine> components;
  Routine combiner;
  bool has_combiner = false;
  size_t max_stack = 0;

  const RewardProgram* program = nullptr;
  const EnvSchema* schema = nullptr;

  void Emit(Routine& r, const Node& n) {
    switch (n.kind) {
      case NodeKind::kConstant:
        Push(r, n.value);
        return;
      case NodeKind::kParam:
        Push(r, program->FindParam(n.name)->value);
        return;
      case NodeKind::kVariable:
        r.code.push_back({Code::kScalar, Op::kNone, static_cast<unsigned>(*schema->IndexOf(n.name))});
        return;
      case NodeKind::kComponent:
        for (unsigned i = 0; i < names.size(); ++i) {
          if (names[i] == n.name) r.code.push_back({Code::kComponent, Op::kNone, i});
        }
        return;
      case NodeKind::kUnary:
        Emit(r, *n.args[0]);
        r.code.push_back({Code::kUnary, n.op, 0});
        return;
      case NodeKind::kBinary:
        Emit(r, *n.args[0]);
        Emit(r, *n.args[1]);
        r.code.push_back({Code::kBinary, n.op, 0});
        return;
      case NodeKind::kClip:
        for (const Expr& a : n.args) Emit(r, *a);
        r.code.push_back({Code::kClip, Op::kNone, 0});
        return;
      case NodeKind::kSeriesStd:
      case NodeKind::kSeriesMean:
        r.code.push_back({n.kind == NodeKind::kSeriesStd ? Code::kStd : Code::kMean, Op::kNone,
                          static_cast<unsigned>(*schema->IndexOf(n.args[0]->name))});
        return;
      case NodeKind::kCompare:
        Emit(r, *n.args[0]);
        Emit(r, *n.args[1]);
        r.code.push_back({Code::kCompare, n.op, 0});
        return;
      case NodeKind::kNot:
        Emit(r, *n.args[0]);
        r.code.push_back({Code::kNot, Op::kNone, 0});
        return;
      case NodeKind::kLogical: {
        bool is_and = n.op == Op::kAnd;
        Emit(r, *n.args[0]);
        size_t short_jump = r.code.size();
        r.code.push_back({is_and ? Code::kJumpIfZero : Code::kJumpIfNonZero, Op::kNone, 0});
        Emit(r, *n.args[1]);
        r.code.push_back({Code::kTruthy, Op::kNone, 0});
        size_t end_jump = r.code.size();
        r.code.push_back({Code::kJump, Op::kNone, 0});
        r.code[short_jump].arg = static_cast<unsigned>(r.code.size());
        Push(r, is_and ? 0.0 : 1.0);
        r.code[end_jump].arg = static_cast<unsigned>(r.code.size());
        return;
      }
      case NodeKind::kConditional: {
        Emit(r, *n.args[0]);
        size_t else_jump = r.code.size();
        r.code.push_back({Code::kJumpIfZero, Op::kNone, 0});
        Emit(r, *n.args[1]);
        size_t end_jump = r.code.size();
        r.code.push_back({Code::kJump, Op::kNone, 0});
        r.code[else_jump].arg = static_cast<unsigned>(r.code.size());
        Emit(r, *n.args[2]);
        r.code[end_jump].arg = static_cast<unsigned>(r.code.size());
        return;
      }
    }
  }

  void Push(Routine& r, double value) {
    r.code.push_back({Code::kConst, Op::kNone, static_cast<unsigned>(constants.size())});
    constants.push_back(value);
  }

  double Exec(const Routine& r, const StateVector& state, const std::vector<double>& comps,
              std::vector<double>& stack, bool& degenerate) const {
    stack.clear();
    size_t pc = 0;
    const size_t end = r.code.size();
    while (pc < end) {
      const Instr& in = r.code[pc++];
      switch (in.code) {
        case Code::kConst:
          stack.push_back(constants[in.arg]);
          break;
        case Code::kScalar:
          stack.push_back(state.scalars[in.arg]);
          break;
        case Code::kComponent:
          stack.push_back(comps[in.arg]);
          break;
        case Code::kUnary:
          stack.back() = arith::Unary(in.op, stack.back());
          break;
        case Code::kBinary: {
          double b = stack.back();
          stack.pop_back();
          stack.back() = arith::Binary(in.op, stack.back(), b, degenerate);
          break;
        }
        case Code::kClip: {
          double hi = stack.back();
          stack.pop_back();
          double lo = stack.back();
          stack.pop_back();
          stack.back() = arith::Clip(stack.back(), lo, hi);
          break;
        }
        case Code::kStd:
          stack.push_back(arith::SeriesStd(state.series[in.arg]));
          break;
        case Code::kMean:
          stack.push_back(arith::SeriesMean(state.series[in.arg]));
          break;
        case Code::kCompare: {
          double b = stack.back();
          stack.pop_back();
          stack.back() = arith::Compare(in.op, stack.back(), b) ? 1.0 : 0.0;
          break;
        }
        case Code::kNot:
          stack.back() = arith::Truthy(stack.back()) ? 0.0 : 1.0;
          break;
        case Code::kTruthy:
          stack.back() = arith::Truthy(stack.back()) ? 1.0 : 0.0;
          break;
        case Code::kJumpIfZero: {
          bool t = arith::Truthy(stack.back());
          stack.pop_back();
          if (!t) pc = in.arg;
          break;
        }
        case Code::kJumpIfNonZero: {
          bool t = arith::Truthy(stack.back());
          stack.pop_back();
          if (t) pc = in.arg;
          break;
        }
        case Code::kJump:
          pc = in.arg;
          break;
      }
    }
    return stack.back();
  }
};

CompiledProgram::CompiledProgram(const RewardProgram& program, const EnvSchema& schema)
    : impl_(std::make_unique<Impl>()) {
  ValidationReport report = Validate(program, schema);
  if (!report.ok()) throw ValidationError(std::move(report));
  impl_->program = &program;
  impl_->schema = &schema;
  impl_->names = program.ComponentNames();
  for (const Component& c : program.components) {
    Routine r;
    impl_->Emit(r, *c.expr);
    impl_->components.push_back(std::move(r));
  }
  if (program.combiner) {
    impl_->has_combiner = true;
    impl_->Emit(impl_->combiner, **program.combiner);
  }
  impl_->program = nullptr;
  impl_->schema = nullptr;
}

CompiledProgram::~CompiledProgram() = default;
CompiledProgram::CompiledProgram(CompiledProgram&&) noexcept = default;
CompiledProgram& CompiledProgram::operator=(CompiledProgram&&) noexcept = default;

const std::vector<std::string>& CompiledProgram::component_names() const { return impl_->names; }

double CompiledProgram::Run(const StateVector& state, std::vector<double>& components,
                            bool& degenerate) const {
  thread_local std::vector<double> stack;
  const Impl& m = *impl_;
  components.resize(m.components.size());
  for (size_t i = 0; i < m.components.size(); ++i) {
    double v = m.Exec(m.components[i], state, components, stack, degenerate);
    if (!std::isfinite(v)) throw NonFiniteResult(m.names[i]);
    components[i] = v;
  }
  double total;
  if (m.has_combiner) {
    total = m.Exec(m.combiner, state, components, stack, degenerate);
  } else {
    total = components[0];
    for (size_t i = 1; i < components.size(); ++i) total = total + components[i];
  }
  if (!std::isfinite(total)) throw NonFiniteResult("total");
  return total;
}

RewardOutput CompiledProgram::Evaluate(const StateVector& state) const {
  RewardOutput out;
  std::vector<double> comps;
  out.total = Run(state, comps, out.degenerate);
  for (size_t i = 0; i < comps.size(); ++i) out.components[impl_->names[i]] = comps[i];
  return out;
}

}  // namespace revo::dsl
