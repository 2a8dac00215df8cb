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

#ifndef REVO_DSL_EVALUATE_H_
#define REVO_DSL_EVALUATE_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "revo/common/error.h"
#include "revo/dsl/ast.h"
#include "revo/dsl/schema.h"

namespace revo::dsl {

struct RewardOutput {
  double total = 0.0;
  std::map<std::string, double> components;
  // Set when a division by zero or pow domain error was replaced by 0.
  bool degenerate = false;
};

class MissingBinding : public Error {
 public:
  explicit MissingBinding(std::string variable);
  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

class NonFiniteResult : public Error {
 public:
  explicit NonFiniteResult(std::string where);
  // Component name, or "total".
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Reference interpreter over a name-keyed state. Expects a validated program.
// Throws MissingBinding when a referenced variable is absent or bound with the
// wrong shape, NonFiniteResult when any component or the total is NaN/inf.
RewardOutput Evaluate(const RewardProgram& program, const State& state);

// Flat, schema-indexed form of a validated program for the training loop.
// Produces results bit-identical to Evaluate on the equivalent State.
class CompiledProgram {
 public:
  // Throws ValidationError when the program is not admissible under schema.
  CompiledProgram(const RewardProgram& program, const EnvSchema& schema);
  ~CompiledProgram();
  CompiledProgram(CompiledProgram&&) noexcept;
  CompiledProgram& operator=(CompiledProgram&&) noexcept;

  const std::vector<std::string>& component_names() const;

  // Evaluates into `components` (one slot per component name, in order) and
  // returns the total. Sets `degenerate` when a sentinel was substituted.
  // Throws NonFiniteResult like Evaluate.
  double Run(const StateVector& state, std::vector<double>& components, bool& degenerate) const;

  RewardOutput Evaluate(const StateVector& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace revo::dsl

#endif  // REVO_DSL_EVALUATE_H_
