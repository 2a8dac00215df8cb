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

#include "revo/dsl/parser.h"

#include <cctype>
#include <functional>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

namespace revo::dsl {
namespace {

constexpr int kMaxNesting = 200;

const std::set<std::string, std::less<>>& ReservedWords() {
  static const auto* words = new std::set<std::string, std::less<>>{
      "dsl", "component", "param", "total", "and",  "or",  "not", "if",  "exp",
      "abs", "sqrt",      "min",   "max",   "pow",  "clip", "std", "mean"};
  return *words;
}

enum class Tok { kEnd, kNumber, kIdent, kSymbol };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      t.type = Tok::kNumber;
      t.text = std::string(src.substr(i, j - i));
      std::string buf = t.text;
      if (buf.front() == '.') buf.insert(buf.begin(), '0');
      auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), t.number);
      if (ec != std::errc() || ptr != buf.data() + buf.size() || !std::isfinite(t.number)) {
        throw ParseError(line, col, "malformed number '" + t.text + "'");
      }
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.type = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static const char* kTwoChar[] = {"<=", ">=", "==", "!="};
      t.type = Tok::kSymbol;
      for (const char* two : kTwoChar) {
        if (src.substr(i, 2) == two) t.text = two;
      }
      if (t.text.empty()) {
        if (std::string_view("+-*/^(),;=<>").find(c) == std::string_view::npos) {
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lex(src)) {}

  RewardProgram ParseProgram() {
    RewardProgram program;
    if (PeekIdent("dsl")) {
      Next();
      const Token& v = Expect(Tok::kIdent, "version after 'dsl'");
      if (v.text != "v1") Fail(v, "unsupported DSL version '" + v.text + "'");
      SkipSeparators();
    }
    bool have_total = false;
    while (Peek().type != Tok::kEnd) {
      const Token& kw = Peek();
      if (kw.type != Tok::kIdent) Fail(kw, "expected 'component', 'param' or 'total'");
      if (kw.text == "component") {
        Next();
        std::string name = ExpectName();
        ExpectSymbol("=");
        Expr e = ParseNumeric();
        program.components.push_back({std::move(name), std::move(e)});
      } else if (kw.text == "param") {
        Next();
        std::string name = ExpectName();
        ExpectSymbol("=");
        double sign = 1.0;
        if (PeekSymbol("-")) {
          Next();
          sign = -1.0;
        } else if (PeekSymbol("+")) {
          Next();
        }
        const Token& num = Expect(Tok::kNumber, "number");
        program.params.push_back({std::move(name), sign * num.number});
      } else if (kw.text == "total") {
        if (have_total) Fail(kw, "duplicate 'total' statement");
        have_total = true;
        Next();
        ExpectSymbol("=");
        program.combiner = ParseNumeric();
      } else {
        Fail(kw, "expected 'component', 'param' or 'total', got '" + kw.text + "'");
      }
      SkipSeparators();
    }
    Resolve(program);
    return program;
  }

  Expr ParseSingleExpr() {
    Expr e = ParseNumeric();
    if (Peek().type != Tok::kEnd) Fail(Peek(), "unexpected '" + Peek().text + "'");
    return e;
  }

 private:
  const Token& Peek(size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& Next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool PeekSymbol(std::string_view s, size_t ahead = 0) const {
    return Peek(ahead).type == Tok::kSymbol && Peek(ahead).text == s;
  }
  bool PeekIdent(std::string_view s) const {
    return Peek().type == Tok::kIdent && Peek().text == s;
  }
  [[noreturn]] void Fail(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.column, msg);
  }
  const Token& Expect(Tok type, const std::string& what) {
    if (Peek().type != type) {
      Fail(Peek(), "expected " + what +
                       (Peek().type == Tok::kEnd ? std::string(", got end of input")
                                                 : ", got '" + Peek().text + "'"));
    }
    return Next();
  }
  void ExpectSymbol(std::string_view s) {
    if (!PeekSymbol(s)) {
      Fail(Peek(), "expected '" + std::string(s) + "'" +
                       (Peek().type == Tok::kEnd ? std::string(", got end of input")
                                                 : ", got '" + Peek().text + "'"));
    }
    Next();
  }
  std::string ExpectName() {
    const Token& t = Expect(Tok::kIdent, "name");
    if (ReservedWords().count(t.text)) Fail(t, "'" + t.text + "' is a reserved word");
    return t.text;
  }
  void SkipSeparators() {
    while (PeekSymbol(";")) Next();
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.nesting_ > kMaxNesting) p.Fail(p.Peek(), "expression nested too deeply");
    }
    ~DepthGuard() { --p.nesting_; }
    Parser& p;
  };

  Expr ParseNumeric() {
    const Token& at = Peek();
    Expr e = ParseOr();
    RequireNumeric(e, at);
    return e;
  }

  void RequireNumeric(const Expr& e, const Token& at) const {
    if (IsPredicate(*e)) Fail(at, "expected a numeric expression, found a condition");
  }

  Expr ParseOr() {
    DepthGuard g(*this);
    Expr lhs = ParseAnd();
    while (PeekIdent("or")) {
      Next();
      lhs = MakeLogical(Op::kOr, lhs, ParseAnd());
    }
    return lhs;
  }

  Expr ParseAnd() {
    Expr lhs = ParseNot();
    while (PeekIdent("and")) {
      Next();
      lhs = MakeLogical(Op::kAnd, lhs, ParseNot());
    }
    return lhs;
  }

  Expr ParseNot() {
    DepthGuard g(*this);
    if (PeekIdent("not")) {
      Next();
      return MakeNot(ParseNot());
    }
    return ParseCompare();
  }

  Expr ParseCompare() {
    const Token& at = Peek();
    Expr lhs = ParseAdd();
    static const std::pair<const char*, Op> kCmp[] = {{"<", Op::kLt},  {"<=", Op::kLe},
                                                      {">", Op::kGt},  {">=", Op::kGe},
                                                      {"==", Op::kEq}, {"!=", Op::kNe}};
    for (const auto& [sym, op] : kCmp) {
      if (PeekSymbol(sym)) {
        RequireNumeric(lhs, at);
        Next();
        const Token& rat = Peek();
        Expr rhs = ParseAdd();
        RequireNumeric(rhs, rat);
        return MakeCompare(op, lhs, rhs);
      }
    }
    return lhs;
  }

  Expr ParseAdd() {
    const Token& at = Peek();
    Expr lhs = ParseMul();
    while (PeekSymbol("+") || PeekSymbol("-")) {
      Op op = Next().text == "+" ? Op::kAdd : Op::kSub;
      RequireNumeric(lhs, at);
      const Token& rat = Peek();
      Expr rhs = ParseMul();
      RequireNumeric(rhs, rat);
      lhs = MakeBinary(op, lhs, rhs);
    }
    return lhs;
  }

  Expr ParseMul() {
    const Token& at = Peek();
    Expr lhs = ParseUnary();
    while (PeekSymbol("*") || PeekSymbol("/")) {
      Op op = Next().text == "*" ? Op::kMul : Op::kDiv;
      RequireNumeric(lhs, at);
      const Token& rat = Peek();
      Expr rhs = ParseUnary();
      RequireNumeric(rhs, rat);
      lhs = MakeBinary(op, lhs, rhs);
    }
    return lhs;
  }

  Expr ParseUnary() {
    DepthGuard g(*this);
    if (PeekSymbol("-")) {
      // A literal directly after '-' folds into a negative constant unless it
      // is the base of a power: -2^2 is -(2^2).
      if (Peek(1).type == Tok::kNumber && !PeekSymbol("^", 2)) {
        Next();
        return MakeConstant(-Next().number);
      }
      const Token& at = Next();
      Expr x = ParseUnary();
      RequireNumeric(x, at);
      return MakeUnary(Op::kNeg, x);
    }
    return ParsePower();
  }

  Expr ParsePower() {
    const Token& at = Peek();
    Expr base = ParsePrimary();
    if (PeekSymbol("^")) {
      RequireNumeric(base, at);
      Next();
      const Token& eat = Peek();
      Expr exponent = ParseUnary();
      RequireNumeric(exponent, eat);
      return MakeBinary(Op::kPow, base, exponent);
    }
    return base;
  }

  std::vector<Expr> ParseArgs(const Token& fn, size_t expected) {
    ExpectSymbol("(");
    std::vector<Expr> args;
    if (!PeekSymbol(")")) {
      while (true) {
        args.push_back(ParseOr());
        if (PeekSymbol(",")) {
          Next();
          continue;
        }
        break;
      }
    }
    ExpectSymbol(")");
    if (args.size() != expected) {
      Fail(fn, fn.text + "() takes " + std::to_string(expected) + " argument" +
                   (expected == 1 ? "" : "s") + ", got " + std::to_string(args.size()));
    }
    return args;
  }

  Expr ParsePrimary() {
    DepthGuard g(*this);
    const Token& t = Peek();
    if (t.type == Tok::kNumber) {
      Next();
      return MakeConstant(t.number);
    }
    if (PeekSymbol("(")) {
      Next();
      Expr e = ParseOr();
      ExpectSymbol(")");
      return e;
    }
    if (t.type != Tok::kIdent) {
      Fail(t, t.type == Tok::kEnd ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }
    const Token fn = Next();
    auto numeric = [&](const Expr& e) {
      RequireNumeric(e, fn);
      return e;
    };
    if (fn.text == "exp" || fn.text == "abs" || fn.text == "sqrt") {
      auto args = ParseArgs(fn, 1);
      Op op = fn.text == "exp" ? Op::kExp : fn.text == "abs" ? Op::kAbs : Op::kSqrt;
      return MakeUnary(op, numeric(args[0]));
    }
    if (fn.text == "min" || fn.text == "max" || fn.text == "pow") {
      auto args = ParseArgs(fn, 2);
      Op op = fn.text == "min" ? Op::kMin : fn.text == "max" ? Op::kMax : Op::kPow;
      return MakeBinary(op, numeric(args[0]), numeric(args[1]));
    }
    if (fn.text == "clip") {
      auto args = ParseArgs(fn, 3);
      return MakeClip(numeric(args[0]), numeric(args[1]), numeric(args[2]));
    }
    if (fn.text == "std" || fn.text == "mean") {
      ExpectSymbol("(");
      const Token& arg = Peek();
      std::string name = ExpectName();
      if (!PeekSymbol(")")) Fail(arg, fn.text + "() takes a single series variable name");
      Next();
      Expr v = MakeVariable(std::move(name));
      return fn.text == "std" ? MakeSeriesStd(v) : MakeSeriesMean(v);
    }
    if (fn.text == "if") {
      auto args = ParseArgs(fn, 3);
      return MakeConditional(args[0], numeric(args[1]), numeric(args[2]));
    }
    if (ReservedWords().count(fn.text)) Fail(fn, "unexpected '" + fn.text + "'");
    if (PeekSymbol("(")) Fail(fn, "unknown function '" + fn.text + "'");
    return MakeVariable(fn.text);
  }

  static void Resolve(RewardProgram& program) {
    std::set<std::string, std::less<>> params;
    std::set<std::string, std::less<>> components;
    for (const auto& p : program.params) params.insert(p.name);
    for (const auto& c : program.components) components.insert(c.name);
    auto in_component = [&](const Node& n) -> Expr {
      if (n.kind == NodeKind::kVariable && params.count(n.name)) return MakeParam(n.name);
      return nullptr;
    };
    for (auto& c : program.components) c.expr = RewriteExpr(c.expr, in_component);
    if (program.combiner) {
      auto in_combiner = [&](const Node& n) -> Expr {
        if (n.kind != NodeKind::kVariable) return nullptr;
        if (components.count(n.name)) return MakeComponentRef(n.name);
        if (params.count(n.name)) return MakeParam(n.name);
        return nullptr;
      };
      // Series functions take variables only; keep their argument untouched.
      std::function<Expr(const Expr&)> walk = [&](const Expr& e) -> Expr {
        if (e->kind == NodeKind::kSeriesStd || e->kind == NodeKind::kSeriesMean) {
          return RewriteExpr(e, in_component);
        }
        if (Expr r = in_combiner(*e)) return r;
        bool changed = false;
        std::vector<Expr> args;
        for (const Expr& a : e->args) {
          args.push_back(walk(a));
          changed |= args.back() != a;
        }
        if (!changed) return e;
        auto copy = std::make_shared<Node>(*e);
        copy->args = std::move(args);
        return copy;
      };
      program.combiner = walk(*program.combiner);
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  int nesting_ = 0;
};

// Binding strength used when rendering; higher binds tighter.
enum Prec : int {
  kPrecOr = 1,
  kPrecAnd = 2,
  kPrecNot = 3,
  kPrecCmp = 4,
  kPrecAdd = 5,
  kPrecMul = 6,
  kPrecUnary = 7,
  kPrecPow = 8,
  kPrecPrimary = 9,
};

int PrecOf(const Node& n) {
  switch (n.kind) {
    case NodeKind::kConstant:
      return std::signbit(n.value) ? kPrecUnary : kPrecPrimary;
    case NodeKind::kUnary:
      return n.op == Op::kNeg ? kPrecUnary : kPrecPrimary;
    case NodeKind::kBinary:
      switch (n.op) {
        case Op::kAdd:
        case Op::kSub:
          return kPrecAdd;
        case Op::kMul:
        case Op::kDiv:
          return kPrecMul;
        case Op::kPow:
          return kPrecPow;
        default:
          return kPrecPrimary;
      }
    case NodeKind::kCompare:
      return kPrecCmp;
    case NodeKind::kLogical:
      return n.op == Op::kAnd ? kPrecAnd : kPrecOr;
    case NodeKind::kNot:
      return kPrecNot;
    default:
      return kPrecPrimary;
  }
}

void RenderInto(const Expr& e, std::ostream& out);

void RenderChild(const Expr& e, bool parens, std::ostream& out) {
  if (parens) out << '(';
  RenderInto(e, out);
  if (parens) out << ')';
}

std::string_view InfixSymbol(Op op) {
  switch (op) {
    case Op::kAdd:
      return "+";
    case Op::kSub:
      return "-";
    case Op::kMul:
      return "*";
    case Op::kDiv:
      return "/";
    case Op::kPow:
      return "^";
    case Op::kLt:
      return "<";
    case Op::kLe:
      return "<=";
    case Op::kGt:
      return ">";
    case Op::kGe:
      return ">=";
    case Op::kEq:
      return "==";
    case Op::kNe:
      return "!=";
    case Op::kAnd:
      return "and";
    case Op::kOr:
      return "or";
    default:
      return "?";
  }
}

void RenderInto(const Expr& e, std::ostream& out) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::kConstant:
      out << FormatNumber(n.value);
      return;
    case NodeKind::kVariable:
    case NodeKind::kParam:
    case NodeKind::kComponent:
      out << n.name;
      return;
    case NodeKind::kUnary: {
      if (n.op == Op::kNeg) {
        const Node& x = *n.args[0];
        // Keep -(3) distinct from the literal -3.
        bool parens = x.kind == NodeKind::kConstant || PrecOf(x) < kPrecUnary;
        out << '-';
        RenderChild(n.args[0], parens, out);
        return;
      }
      out << OpName(n.op) << '(';
      RenderInto(n.args[0], out);
      out << ')';
      return;
    }
    case NodeKind::kBinary: {
      if (n.op == Op::kMin || n.op == Op::kMax) {
        out << OpName(n.op) << '(';
        RenderInto(n.args[0], out);
        out << ", ";
        RenderInto(n.args[1], out);
        out << ')';
        return;
      }
      int p = PrecOf(n);
      if (n.op == Op::kPow) {
        RenderChild(n.args[0], PrecOf(*n.args[0]) < kPrecPrimary, out);
        out << " ^ ";
        RenderChild(n.args[1], PrecOf(*n.args[1]) < kPrecUnary, out);
        return;
      }
      RenderChild(n.args[0], PrecOf(*n.args[0]) < p, out);
      out << ' ' << InfixSymbol(n.op) << ' ';
      RenderChild(n.args[1], PrecOf(*n.args[1]) <= p, out);
      return;
    }
    case NodeKind::kCompare:
      RenderChild(n.args[0], PrecOf(*n.args[0]) < kPrecAdd, out);
      out << ' ' << InfixSymbol(n.op) << ' ';
      RenderChild(n.args[1], PrecOf(*n.args[1]) < kPrecAdd, out);
      return;
    case NodeKind::kLogical: {
      int p = PrecOf(n);
      RenderChild(n.args[0], PrecOf(*n.args[0]) < p, out);
      out << ' ' << InfixSymbol(n.op) << ' ';
      RenderChild(n.args[1], PrecOf(*n.args[1]) <= p, out);
      return;
    }
    case NodeKind::kNot:
      out << "not ";
      RenderChild(n.args[0], PrecOf(*n.args[0]) < kPrecNot, out);
      return;
    case NodeKind::kClip:
      out << "clip(";
      RenderInto(n.args[0], out);
      out << ", ";
      RenderInto(n.args[1], out);
      out << ", ";
      RenderInto(n.args[2], out);
      out << ')';
      return;
    case NodeKind::kSeriesStd:
    case NodeKind::kSeriesMean:
      out << (n.kind == NodeKind::kSeriesStd ? "std(" : "mean(") << n.args[0]->name << ')';
      return;
    case NodeKind::kConditional:
      out << "if(";
      RenderInto(n.args[0], out);
      out << ", ";
      RenderInto(n.args[1], out);
      out << ", ";
      RenderInto(n.args[2], out);
      out << ')';
      return;
  }
}

}  // namespace

ParseError::ParseError(int line, int column, const std::string& message)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            message),
      line_(line),
      column_(column) {}

RewardProgram Parse(std::string_view source) { return Parser(source).ParseProgram(); }

Expr ParseExpr(std::string_view source) { return Parser(source).ParseSingleExpr(); }

std::string FormatNumber(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string RenderExpr(const Expr& expr) {
  std::ostringstream out;
  RenderInto(expr, out);
  return out.str();
}

std::string Render(const RewardProgram& program) {
  std::ostringstream out;
  out << kDslHeader << "\n";
  for (const auto& p : program.params) {
    out << "param " << p.name << " = " << FormatNumber(p.value) << "\n";
  }
  for (const auto& c : program.components) {
    out << "component " << c.name << " = ";
    RenderInto(c.expr, out);
    out << "\n";
  }
  if (program.combiner) {
    out << "total = ";
    RenderInto(*program.combiner, out);
    out << "\n";
  }
  return out.str();
}

}  // namespace revo::dsl
