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

#ifndef REVO_DESIGNER_MOCK_BACKEND_H_
#define REVO_DESIGNER_MOCK_BACKEND_H_

// Deterministic stand-in for an LLM designer. Programs are assembled from a
// per-task library of parameterized component templates (data/mock/*.json).

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "revo/common/random.h"
#include "revo/designer/designer.h"

namespace revo::designer {

struct ComponentTemplate {
  std::string name;
  std::string aspect;
  dsl::Expr expr;  // template params appear as variables named in `params`
  std::vector<std::pair<std::string, std::pair<double, double>>> params;  // name -> [lo, hi)
};

struct TemplateLibrary {
  std::string id;
  std::string task;
  std::map<std::string, std::vector<std::string>> aspect_variables;
  std::vector<ComponentTemplate> templates;
};

// Throws ConfigError for unknown tasks.
const TemplateLibrary& LoadTemplateLibrary(std::string_view task);

// Aspects listed after "Negative:" in a composed feedback string.
std::vector<std::string> NegativeAspects(std::string_view feedback);

// Drops params no expression references.
dsl::RewardProgram PruneUnusedParams(dsl::RewardProgram program);

// Instantiates `t` as component `name`, adding its params (prefixed with the
// component name and made unique against `program` and `schema`) to program.
dsl::Component Instantiate(const ComponentTemplate& t, const std::string& name,
                           dsl::RewardProgram& program, const dsl::EnvSchema& schema, Rng& rng);

dsl::RewardProgram MockInit(const TemplateLibrary& library, const dsl::EnvSchema& schema, Rng& rng);

// Changes exactly one component: a param tweak, a template swap, an added
// component or a removed one. Components implicated by negative feedback or
// flat statistics are picked more often.
dsl::RewardProgram MockMutate(const TemplateLibrary& library, const dsl::EnvSchema& schema,
                              const ParentInfo& parent, Rng& rng);

// Child built only from parent components, at least one from each parent.
// Colliding names get a "_b" suffix; colliding params with different values
// are renamed. The child sums its components.
dsl::RewardProgram MockCrossover(const dsl::EnvSchema& schema, const ParentInfo& a,
                                 const ParentInfo& b, Rng& rng);

struct MockOptions {
  uint64_t seed = 0;
  // Probability that an attempt returns an unusable reply (exercises retries).
  double malformed_rate = 0.0;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockOptions options = {}) : options_(options) {}

  std::string kind() const override { return "mock"; }
  // Depends only on (options, request, attempt).
  std::string Complete(const DesignRequest& request, const Prompt& prompt,
                       int attempt) const override;

  const MockOptions& options() const { return options_; }

 private:
  MockOptions options_;
};

}  // namespace revo::designer

#endif  // REVO_DESIGNER_MOCK_BACKEND_H_
