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

#ifndef REVO_DSL_PARSER_H_
#define REVO_DSL_PARSER_H_

// Text form of reward programs ("dsl v1").
//
//   dsl v1
//   # comments run to end of line
//   param t_speed = 0.5
//   component speed = exp(-t_speed * abs(speed - 9.75))
//   component crash = if(collision, -1, 0)
//   total = clip(speed + crash, -1, 1)
//
// Statements are `param NAME = NUMBER`, `component NAME = EXPR` and at most one
// `total = EXPR`; `;` separators are optional. The header line is optional on
// input and always emitted by Render. Expressions support + - * / ^, unary -,
// comparisons (< <= > >= == !=), and/or/not, and the functions exp, abs, sqrt
// (of |x|), min, max, pow, clip(x, lo, hi), std(series), mean(series) and
// if(predicate, then, else).
//
// Name resolution: inside a component a name is a param if one is declared
// with that name, otherwise an environment variable. Inside `total` a name is a
// component first, then a param, then a variable.

#include <string>
#include <string_view>

#include "revo/common/error.h"
#include "revo/dsl/ast.h"

namespace revo::dsl {

inline constexpr std::string_view kDslHeader = "dsl v1";

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Syntactic parse. Does not consult a schema; see ParseAndValidate.
RewardProgram Parse(std::string_view source);

// Parses a single expression (component context: names resolve to variables).
Expr ParseExpr(std::string_view source);

std::string Render(const RewardProgram& program);
std::string RenderExpr(const Expr& expr);

// Shortest text that reads back to the same double.
std::string FormatNumber(double value);

}  // namespace revo::dsl

#endif  // REVO_DSL_PARSER_H_
