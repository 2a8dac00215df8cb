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

#ifndef REVO_DSL_SCHEMA_H_
#define REVO_DSL_SCHEMA_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace revo::dsl {

enum class VarKind { kScalar, kFlag, kSeries };

std::string_view VarKindName(VarKind kind);
VarKind ParseVarKind(std::string_view name);

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::kScalar;
  std::string units;
  std::string doc;
};

// The environment variables a reward program may read. Immutable once built.
class EnvSchema {
 public:
  EnvSchema() = default;
  // Throws revo::ConfigError on duplicate or malformed names.
  EnvSchema(std::string name, std::vector<VariableSpec> variables);

  const std::string& name() const { return name_; }
  const std::vector<VariableSpec>& variables() const { return variables_; }
  size_t size() const { return variables_.size(); }

  std::optional<size_t> IndexOf(std::string_view variable) const;
  const VariableSpec* Find(std::string_view variable) const;

  // Human-readable listing used in designer prompts.
  std::string Describe() const;

  friend bool operator==(const EnvSchema& a, const EnvSchema& b);

 private:
  std::string name_;
  std::vector<VariableSpec> variables_;
};

bool operator==(const VariableSpec& a, const VariableSpec& b);

// A named binding for one variable. Flags bind as 0.0 / 1.0.
using Value = std::variant<double, std::vector<double>>;
using State = std::map<std::string, Value, std::less<>>;

// Schema-indexed bindings used on hot paths (training). Slot i holds variable
// i of the schema: `scalars[i]` for scalar/flag kinds, `series[i]` for series.
struct StateVector {
  std::vector<double> scalars;
  std::vector<std::vector<double>> series;

  explicit StateVector(size_t n = 0) : scalars(n, 0.0), series(n) {}
};

State ToState(const EnvSchema& schema, const StateVector& vector);

bool IsIdentifier(std::string_view text);

}  // namespace revo::dsl

#endif  // REVO_DSL_SCHEMA_H_
