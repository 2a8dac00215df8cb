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

#ifndef REVO_DSL_JSON_H_
#define REVO_DSL_JSON_H_

#include "json.hpp"
#include "revo/dsl/ast.h"
#include "revo/dsl/schema.h"

namespace revo::dsl {

// Canonical JSON form of the AST:
//   {"const": 1.5} {"var": "speed"} {"param": "t1"} {"component": "pos"}
//   {"op": "add", "args": [...]}
// Operators without an Op name serialize as "clip", "std", "mean", "not"
// and "if". Programs serialize as
//   {"version": 1, "params": [{"name", "value"}], "components": [{"name",
//    "expr"}], "combiner": expr | null}.
nlohmann::json ExprToJson(const Expr& e);
Expr ExprFromJson(const nlohmann::json& j);

nlohmann::json ProgramToJson(const RewardProgram& program);
// Throws revo::Error on malformed input.
RewardProgram ProgramFromJson(const nlohmann::json& j);

nlohmann::json SchemaToJson(const EnvSchema& schema);
EnvSchema SchemaFromJson(const nlohmann::json& j);

}  // namespace revo::dsl

#endif  // REVO_DSL_JSON_H_
