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

#include "revo/dsl/schema.h"

#include <cctype>
#include <set>
#include <sstream>

#include "revo/common/error.h"

namespace revo::dsl {

std::string_view VarKindName(VarKind kind) {
  switch (kind) {
    case VarKind::kScalar:
      return "scalar";
    case VarKind::kFlag:
      return "flag";
    case VarKind::kSeries:
      return "series";
  }
  return "scalar";
}

VarKind ParseVarKind(std::string_view name) {
  if (name == "scalar") return VarKind::kScalar;
  if (name == "flag") return VarKind::kFlag;
  if (name == "series") return VarKind::kSeries;
  throw ConfigError("unknown variable kind '" + std::string(name) + "'");
}

bool IsIdentifier(std::string_view text) {
  if (text.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(text[0])) || text[0] == '_')) return false;
  for (char c : text) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

EnvSchema::EnvSchema(std::string name, std::vector<VariableSpec> variables)
    : name_(std::move(name)), variables_(std::move(variables)) {
  std::set<std::string, std::less<>> seen;
  for (const auto& v : variables_) {
    if (!IsIdentifier(v.name)) throw ConfigError("invalid variable name '" + v.name + "'");
    if (!seen.insert(v.name).second) {
      throw ConfigError("duplicate variable '" + v.name + "' in schema " + name_);
    }
  }
}

std::optional<size_t> EnvSchema::IndexOf(std::string_view variable) const {
  for (size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == variable) return i;
  }
  return std::nullopt;
}

const VariableSpec* EnvSchema::Find(std::string_view variable) const {
  auto i = IndexOf(variable);
  return i ? &variables_[*i] : nullptr;
}

std::string EnvSchema::Describe() const {
  std::ostringstream out;
  for (const auto& v : variables_) {
    out << "- " << v.name << " (" << VarKindName(v.kind);
    if (!v.units.empty()) out << ", " << v.units;
    out << ")";
    if (!v.doc.empty()) out << ": " << v.doc;
    out << "\n";
  }
  return out.str();
}

bool operator==(const VariableSpec& a, const VariableSpec& b) {
  return a.name == b.name && a.kind == b.kind && a.units == b.units && a.doc == b.doc;
}

bool operator==(const EnvSchema& a, const EnvSchema& b) {
  return a.name_ == b.name_ && a.variables_ == b.variables_;
}

State ToState(const EnvSchema& schema, const StateVector& vector) {
  State state;
  for (size_t i = 0; i < schema.size(); ++i) {
    const auto& spec = schema.variables()[i];
    if (spec.kind == VarKind::kSeries) {
      state.emplace(spec.name, vector.series[i]);
    } else {
      state.emplace(spec.name, vector.scalars[i]);
    }
  }
  return state;
}

}  // namespace revo::dsl
