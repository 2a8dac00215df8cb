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

#include "revo/designer/mock_backend.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "json.hpp"
#include "revo/common/resources.h"
#include "revo/dsl/parser.h"

namespace revo::designer {
namespace {

using dsl::Expr;
using dsl::RewardProgram;

constexpr size_t kMaxComponents = 8;

TemplateLibrary ParseLibrary(std::string_view text) {
  TemplateLibrary lib;
  try {
    auto j = nlohmann::json::parse(text);
    lib.id = j.at("library").get<std::string>();
    lib.task = j.at("task").get<std::string>();
    lib.aspect_variables = j.at("aspect_variables").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& t : j.at("templates")) {
      ComponentTemplate ct;
      ct.name = t.at("name").get<std::string>();
      ct.aspect = t.at("aspect").get<std::string>();
      ct.expr = dsl::ParseExpr(t.at("expr").get<std::string>());
      for (const auto& [name, range] : t.at("params").items())
        ct.params.push_back({name, {range.at(0).get<double>(), range.at(1).get<double>()}});
      lib.templates.push_back(std::move(ct));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad template library: ") + e.what());
  }
  return lib;
}

std::set<std::string> VariablesOf(const Expr& e) {
  std::set<std::string> out;
  dsl::VisitExpr(e, [&](const dsl::Node& n) {
    if (n.kind == dsl::NodeKind::kVariable) out.insert(n.name);
  });
  return out;
}

bool NameTaken(const std::string& name, const RewardProgram& p, const dsl::EnvSchema& schema) {
  return p.FindParam(name) || p.FindComponent(name) || schema.Find(name);
}

std::string UniqueName(const std::string& base, const RewardProgram& p,
                       const dsl::EnvSchema& schema) {
  if (!NameTaken(base, p, schema)) return base;
  for (int i = 2;; ++i) {
    std::string name = base + "_" + std::to_string(i);
    if (!NameTaken(name, p, schema)) return name;
  }
}

Expr RenameParams(const Expr& e, const std::map<std::string, std::string>& renames) {
  return dsl::RewriteExpr(e, [&](const dsl::Node& n) -> Expr {
    if (n.kind != dsl::NodeKind::kParam) return nullptr;
    auto it = renames.find(n.name);
    return it == renames.end() ? nullptr : dsl::MakeParam(it->second);
  });
}

// Template choice, weighting aspects that drew negative feedback.
const ComponentTemplate& PickTemplate(const TemplateLibrary& lib,
                                      const std::vector<std::string>& negatives, Rng& rng) {
  std::vector<double> w;
  for (const auto& t : lib.templates)
    w.push_back(std::count(negatives.begin(), negatives.end(), t.aspect) ? 3.0 : 1.0);
  return lib.templates[WeightedIndex(rng, w)];
}

// Exclusive means no other component references the param.
bool ExclusiveParam(const RewardProgram& p, size_t component, const std::string& param) {
  for (size_t i = 0; i < p.components.size(); ++i) {
    if (i == component) continue;
    auto refs = dsl::ReferencedParams(p.components[i].expr);
    if (std::count(refs.begin(), refs.end(), param)) return false;
  }
  if (p.combiner) {
    auto refs = dsl::ReferencedParams(*p.combiner);
    if (std::count(refs.begin(), refs.end(), param)) return false;
  }
  return true;
}

void Tweak(RewardProgram& p, size_t c, const dsl::EnvSchema& schema, Rng& rng) {
  auto refs = dsl::ReferencedParams(p.components[c].expr);
  double factor = std::exp(UniformRange(rng, -0.7, 0.7));
  if (refs.empty()) {
    std::string name = UniqueName(p.components[c].name + "_scale", p, schema);
    p.params.push_back({name, factor});
    p.components[c].expr = dsl::MakeBinary(dsl::Op::kMul, dsl::MakeParam(name), p.components[c].expr);
    return;
  }
  const std::string target = refs[UniformIndex(rng, refs.size())];
  double old = p.FindParam(target)->value;
  double value = old == 0.0 ? UniformRange(rng, -0.5, 0.5) : old * factor;
  if (value == old) value = old + 0.125;
  if (ExclusiveParam(p, c, target)) {
    for (auto& param : p.params)
      if (param.name == target) param.value = value;
    return;
  }
  std::string name = UniqueName(p.components[c].name + "_" + target, p, schema);
  p.params.push_back({name, value});
  p.components[c].expr = RenameParams(p.components[c].expr, {{target, name}});
}

}  // namespace

const TemplateLibrary& LoadTemplateLibrary(std::string_view task) {
  static std::mutex mu;
  static std::map<std::string, TemplateLibrary, std::less<>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(task);
  if (it != cache.end()) return it->second;
  std::string path = "data/mock/" + std::string(task) + ".json";
  if (!EmbeddedResources().count(path)) throw ConfigError("no mock template library for task: " + std::string(task));
  return cache.emplace(std::string(task), ParseLibrary(EmbeddedResource(path))).first->second;
}

std::vector<std::string> NegativeAspects(std::string_view feedback) {
  std::vector<std::string> out;
  size_t pos = feedback.find("Negative:");
  if (pos == std::string_view::npos) return out;
  std::string_view rest = feedback.substr(pos + 9);
  size_t end = rest.find('.');
  if (end != std::string_view::npos) rest = rest.substr(0, end);
  while (!rest.empty()) {
    size_t comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

RewardProgram PruneUnusedParams(RewardProgram program) {
  std::set<std::string> used;
  for (const auto& c : program.components)
    for (auto& n : dsl::ReferencedParams(c.expr)) used.insert(n);
  if (program.combiner)
    for (auto& n : dsl::ReferencedParams(*program.combiner)) used.insert(n);
  std::erase_if(program.params, [&](const dsl::Param& p) { return !used.count(p.name); });
  return program;
}

dsl::Component Instantiate(const ComponentTemplate& t, const std::string& name,
                           RewardProgram& program, const dsl::EnvSchema& schema, Rng& rng) {
  std::map<std::string, std::string> names;
  for (const auto& [param, range] : t.params) {
    std::string full = UniqueName(name + "_" + param, program, schema);
    program.params.push_back({full, UniformRange(rng, range.first, range.second)});
    names[param] = full;
  }
  Expr expr = dsl::RewriteExpr(t.expr, [&](const dsl::Node& n) -> Expr {
    if (n.kind != dsl::NodeKind::kVariable) return nullptr;
    auto it = names.find(n.name);
    return it == names.end() ? nullptr : dsl::MakeParam(it->second);
  });
  return {name, expr};
}

RewardProgram MockInit(const TemplateLibrary& library, const dsl::EnvSchema& schema, Rng& rng) {
  RewardProgram p;
  size_t n = 3 + UniformIndex(rng, 3);
  std::vector<size_t> order(library.templates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Shuffle(order, rng);
  for (size_t i = 0; i < n && i < order.size(); ++i) {
    const auto& t = library.templates[order[i]];
    std::string name = UniqueName(t.name, p, schema);
    // Reserve the component name before its params take prefixed names.
    p.components.push_back({name, dsl::MakeConstant(0.0)});
    p.components.back() = Instantiate(t, name, p, schema, rng);
  }
  return p;
}

RewardProgram MockMutate(const TemplateLibrary& library, const dsl::EnvSchema& schema,
                         const ParentInfo& parent, Rng& rng) {
  RewardProgram p = parent.program;
  std::vector<std::string> negatives = NegativeAspects(parent.feedback);
  std::set<std::string> blamed;
  for (const auto& a : negatives) {
    auto it = library.aspect_variables.find(a);
    if (it != library.aspect_variables.end()) blamed.insert(it->second.begin(), it->second.end());
  }
  std::vector<double> weights;
  for (const auto& c : p.components) {
    double w = 1.0;
    for (const auto& v : VariablesOf(c.expr))
      if (blamed.count(v)) {
        w += 2.0;
        break;
      }
    auto st = parent.statistics.find(c.name);
    if (st != parent.statistics.end() && !st->second.empty() &&
        st->second.back().max - st->second.back().min < 1e-9)
      w += 1.0;
    weights.push_back(w);
  }
  size_t c = WeightedIndex(rng, weights);

  double roll = UniformDouble(rng);
  if (roll < 0.5) {
    Tweak(p, c, schema, rng);
  } else if (roll < 0.75) {
    const ComponentTemplate& t = PickTemplate(library, negatives, rng);
    std::string name = p.components[c].name;
    p.components[c] = Instantiate(t, name, p, schema, rng);
  } else if (roll < 0.9 && p.components.size() < kMaxComponents) {
    const ComponentTemplate& t = PickTemplate(library, negatives, rng);
    std::string name = UniqueName(t.name, p, schema);
    p.components.push_back({name, dsl::MakeConstant(0.0)});
    p.components.back() = Instantiate(t, name, p, schema, rng);
    if (p.combiner)
      p.combiner = dsl::MakeBinary(dsl::Op::kAdd, *p.combiner, dsl::MakeComponentRef(name));
  } else if (p.components.size() >= 2) {
    std::string gone = p.components[c].name;
    p.components.erase(p.components.begin() + static_cast<std::ptrdiff_t>(c));
    if (p.combiner) {
      p.combiner = dsl::RewriteExpr(*p.combiner, [&](const dsl::Node& n) -> Expr {
        return n.kind == dsl::NodeKind::kComponent && n.name == gone ? dsl::MakeConstant(0.0)
                                                                       : nullptr;
      });
    }
  } else {
    Tweak(p, c, schema, rng);
  }
  return PruneUnusedParams(std::move(p));
}

RewardProgram MockCrossover(const dsl::EnvSchema& schema, const ParentInfo& a, const ParentInfo& b,
                            Rng& rng) {
  auto choose = [&](const RewardProgram& p) {
    std::vector<size_t> picked;
    for (size_t i = 0; i < p.components.size(); ++i)
      if (Bernoulli(rng, 0.5)) picked.push_back(i);
    if (picked.empty() && !p.components.empty()) picked.push_back(UniformIndex(rng, p.components.size()));
    return picked;
  };
  std::vector<size_t> from_a = choose(a.program);
  std::vector<size_t> from_b = choose(b.program);

  RewardProgram child;
  auto take = [&](const RewardProgram& src, size_t index) {
    const dsl::Component& comp = src.components[index];
    std::map<std::string, std::string> renames;
    for (const auto& name : dsl::ReferencedParams(comp.expr)) {
      double value = src.FindParam(name)->value;
      const dsl::Param* existing = child.FindParam(name);
      if (existing && existing->value == value) continue;
      if (!existing && !child.FindComponent(name)) {
        child.params.push_back({name, value});
        continue;
      }
      std::string fresh = UniqueName(name + "_b", child, schema);
      child.params.push_back({fresh, value});
      renames[name] = fresh;
    }
    std::string name = comp.name;
    if (child.FindComponent(name) || child.FindParam(name)) name = UniqueName(name + "_b", child, schema);
    child.components.push_back({name, renames.empty() ? comp.expr : RenameParams(comp.expr, renames)});
  };
  for (size_t i : from_a) take(a.program, i);
  for (size_t i : from_b) take(b.program, i);
  return child;
}

std::string MockBackend::Complete(const DesignRequest& request, const Prompt&, int attempt) const {
  CheckRequest(request);
  Rng rng(MixSeed({options_.seed, RequestFingerprint(request), static_cast<uint64_t>(attempt)}));
  if (Bernoulli(rng, options_.malformed_rate)) {
    return Bernoulli(rng, 0.5) ? "I would reward progress and penalize crashes."
                               : "```dsl\ncomponent broken = (1 +\n```\n";
  }
  const TemplateLibrary& lib = LoadTemplateLibrary(request.task);
  RewardProgram program;
  switch (request.op) {
    case Operator::kInit:
      program = MockInit(lib, request.schema, rng);
      break;
    case Operator::kMutate:
      program = MockMutate(lib, request.schema, request.parents[0], rng);
      break;
    case Operator::kCrossover:
      program = MockCrossover(request.schema, request.parents[0], request.parents[1], rng);
      break;
  }
  return "Proposed reward (" + std::string(OperatorName(request.op)) + "):\n```dsl\n" +
         dsl::Render(program) + "```\n";
}

}  // namespace revo::designer
