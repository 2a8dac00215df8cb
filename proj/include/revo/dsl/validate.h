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

#ifndef REVO_DSL_VALIDATE_H_
#define REVO_DSL_VALIDATE_H_

#include <string>
#include <string_view>
#include <vector>

#include "revo/common/error.h"
#include "revo/dsl/ast.h"
#include "revo/dsl/schema.h"

namespace revo::dsl {

inline constexpr int kMaxExprDepth = 32;
inline constexpr int kMaxProgramNodes = 512;

enum class FindingKind {
  kNoComponents,
  kDuplicateComponent,
  kDuplicateParam,
  kUnboundName,
  kUnusedParam,
  kUndeclaredParam,
  kNonFiniteParam,
  kNameConflict,
  kKindMismatch,
  kComponentRefOutsideCombiner,
  kUnknownComponent,
  kTypeError,
  kDepthExceeded,
  kNodeCountExceeded,
};

std::string_view FindingKindName(FindingKind kind);

struct Finding {
  FindingKind kind;
  std::string subject;  // offending name (variable, param, component)
  std::string where;    // component name or "total"
  long value = 0;       // measured depth / node count
  long limit = 0;

  std::string Describe() const;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  bool Has(FindingKind kind) const;
  std::string Describe() const;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Lists every reason `program` is not admissible under `schema`. An empty
// report means the program may be compiled and evaluated.
ValidationReport Validate(const RewardProgram& program, const EnvSchema& schema);

// Parse followed by Validate; throws ParseError or ValidationError.
RewardProgram ParseAndValidate(std::string_view source, const EnvSchema& schema);

}  // namespace revo::dsl

#endif  // REVO_DSL_VALIDATE_H_
