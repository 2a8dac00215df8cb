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

#include "revo/dsl/json.h"

#include <string>

#include "revo/common/error.h"

namespace revo::dsl {

using nlohmann::json;

namespace {

std::string_view KindOpName(const Node& n) {
  switch (n.kind) {
    case NodeKind::kClip:
      return "clip";
    case NodeKind::kSeriesStd:
      return "std";
    case NodeKind::kSeriesMean:
      return "mean";
    case NodeKind::kNot:
      return "not";
    case NodeKind::kConditional:
      return "if";
    default:
      return OpName(n.op);
  }
}

[[noreturn]] void Malformed(const std::string& what) {
  throw Error("malformed program JSON: " + what);
}

}  // namespace

json ExprToJson(const Expr& e) {
  const Node& n = *e;
  switch (n.kind) {
    case NodeKind::kConstant:
      return json{{"const", n.value}};
    case NodeKind::kVariable:
      return json{{"var", n.name}};
    case NodeKind::kParam:
      return json{{"param", n.name}};
    case NodeKind::kComponent:
      return json{{"component", n.name}};
    default:
      break;
  }
  json args = json::array();
  for (const Expr& a : n.args) args.push_back(ExprToJson(a));
  return json{{"op", std::string(KindOpName(n))}, {"args", std::move(args)}};
}

Expr ExprFromJson(const json& j) {
  if (!j.is_object()) Malformed("expression is not an object");
  if (j.contains("const")) {
    if (!j["const"].is_number()) Malformed("const is not a number");
    return MakeConstant(j["const"].get<double>());
  }
  auto name_of = [&](const char* key) {
    if (!j[key].is_string()) Malformed(std::string(key) + " is not a string");
    return j[key].get<std::string>();
  };
  if (j.contains("var")) return MakeVariable(name_of("var"));
  if (j.contains("param")) return MakeParam(name_of("param"));
  if (j.contains("component")) return MakeComponentRef(name_of("component"));
  if (!j.contains("op") || !j["op"].is_string() || !j.contains("args") || !j["args"].is_array()) {
    Malformed("expected op and args");
  }
  std::string op = j["op"].get<std::string>();
  std::vector<Expr> args;
  for (const json& a : j["args"]) args.push_back(ExprFromJson(a));
  auto need = [&](size_t n) {
    if (args.size() != n) Malformed("operator '" + op + "' takes " + std::to_string(n) + " args");
  };
  if (op == "clip") {
    need(3);
    return MakeClip(args[0], args[1], args[2]);
  }
  if (op == "std" || op == "mean") {
    need(1);
    if (args[0]->kind != NodeKind::kVariable) Malformed(op + " takes a variable");
    return op == "std" ? MakeSeriesStd(args[0]) : MakeSeriesMean(args[0]);
  }
  if (op == "not") {
    need(1);
    return MakeNot(args[0]);
  }
  if (op == "if") {
    need(3);
    return MakeConditional(args[0], args[1], args[2]);
  }
  Op o = OpFromName(op);
  switch (o) {
    case Op::kNeg:
    case Op::kExp:
    case Op::kAbs:
    case Op::kSqrt:
      need(1);
      return MakeUnary(o, args[0]);
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv:
    case Op::kMin:
    case Op::kMax:
    case Op::kPow:
      need(2);
      return MakeBinary(o, args[0], args[1]);
    case Op::kLt:
    case Op::kLe:
    case Op::kGt:
    case Op::kGe:
    case Op::kEq:
    case Op::kNe:
      need(2);
      return MakeCompare(o, args[0], args[1]);
    case Op::kAnd:
    case Op::kOr:
      need(2);
      return MakeLogical(o, args[0], args[1]);
    case Op::kNone:
      break;
  }
  Malformed("unknown operator '" + op + "'");
}

json ProgramToJson(const RewardProgram& program) {
  json params = json::array();
  for (const Param& p : program.params) params.push_back({{"name", p.name}, {"value", p.value}});
  json components = json::array();
  for (const Component& c : program.components) {
    components.push_back({{"name", c.name}, {"expr", ExprToJson(c.expr)}});
  }
  json out;
  out["version"] = 1;
  out["params"] = std::move(params);
  out["components"] = std::move(components);
  out["combiner"] = program.combiner ? ExprToJson(*program.combiner) : json(nullptr);
  return out;
}

RewardProgram ProgramFromJson(const json& j) {
  if (!j.is_object() || j.value("version", 0) != 1) Malformed("missing version 1");
  RewardProgram program;
  try {
    for (const json& p : j.at("params")) {
      program.params.push_back({p.at("name").get<std::string>(), p.at("value").get<double>()});
    }
    for (const json& c : j.at("components")) {
      program.components.push_back({c.at("name").get<std::string>(), ExprFromJson(c.at("expr"))});
    }
    if (j.contains("combiner") && !j["combiner"].is_null()) {
      program.combiner = ExprFromJson(j["combiner"]);
    }
  } catch (const json::exception& e) {
    Malformed(e.what());
  }
  return program;
}

json SchemaToJson(const EnvSchema& schema) {
  json vars = json::array();
  for (const VariableSpec& v : schema.variables()) {
    vars.push_back({{"name", v.name},
                    {"kind", std::string(VarKindName(v.kind))},
                    {"units", v.units},
                    {"doc", v.doc}});
  }
  return json{{"name", schema.name()}, {"variables", std::move(vars)}};
}

EnvSchema SchemaFromJson(const json& j) {
  std::vector<VariableSpec> vars;
  try {
    for (const json& v : j.at("variables")) {
      vars.push_back({v.at("name").get<std::string>(),
                      ParseVarKind(v.at("kind").get<std::string>()),
                      v.value("units", ""), v.value("doc", "")});
    }
    return EnvSchema(j.at("name").get<std::string>(), std::move(vars));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed schema JSON: ") + e.what());
  }
}

}  // namespace revo::dsl
