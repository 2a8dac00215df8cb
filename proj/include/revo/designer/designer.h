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

#ifndef REVO_DESIGNER_DESIGNER_H_
#define REVO_DESIGNER_DESIGNER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revo/common/error.h"
#include "revo/dsl/ast.h"
#include "revo/dsl/schema.h"
#include "revo/fitness/component_stats.h"

namespace revo::designer {

enum class Operator { kInit, kMutate, kCrossover };

std::string_view OperatorName(Operator op);
// Throws ConfigError on unknown names.
Operator ParseOperator(std::string_view name);

struct ParentInfo {
  std::string id;
  dsl::RewardProgram program;
  double sigma = 0.0;
  std::string feedback;  // lambda
  fitness::ComponentStatistics statistics;
};

struct DesignRequest {
  Operator op = Operator::kInit;
  std::string task;
  std::string task_description;  // empty: the task's stock description
  dsl::EnvSchema schema;
  std::vector<ParentInfo> parents;
  bool include_statistics = true;
  int retries = 3;
  // Distinguishes otherwise identical requests (e.g. two slots mutating the
  // same parent).
  uint64_t nonce = 0;
};

// Throws std::invalid_argument unless init has 0 parents, mutate 1 and
// crossover 2, and retries >= 1.
void CheckRequest(const DesignRequest& request);

// Stable digest of everything that may influence a design.
uint64_t RequestFingerprint(const DesignRequest& request);

struct Prompt {
  std::string system;
  std::string user;
  std::string Text() const { return system + "\n\n" + user; }
};

// Stock task description shipped with the prompt templates.
std::string TaskDescription(std::string_view task);

// Replaces every {{slot}}; throws ConfigError for a slot missing from `slots`.
std::string FillTemplate(std::string_view text, const std::map<std::string, std::string>& slots);

// Builds the system and user messages from prompts/v1.
Prompt RenderPrompt(const DesignRequest& request);

class DesignerParseError : public Error {
 public:
  enum class Reason { kNoCodeBlock, kSyntax, kValidation };
  DesignerParseError(Reason reason, const std::string& detail);
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

std::string_view ReasonName(DesignerParseError::Reason reason);

// Body of the first ``` fenced block, if any. The info string is ignored.
std::optional<std::string> ExtractCodeBlock(std::string_view text);

// Parses the first fenced block and validates it against `schema`.
dsl::RewardProgram ParseDesignerResponse(std::string_view text, const dsl::EnvSchema& schema);

class DesignerExhausted : public Error {
 public:
  DesignerExhausted(int attempts, const std::string& last_error);
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// The backend could not be reached or answered with a transport-level error.
class TransportError : public Error {
 public:
  using Error::Error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string kind() const = 0;
  // Raw response text for one attempt. Implementations must be safe to call
  // concurrently.
  virtual std::string Complete(const DesignRequest& request, const Prompt& prompt,
                               int attempt) const = 0;
};

struct DesignOutcome {
  dsl::RewardProgram program;
  int attempts = 0;
};

// Renders the prompt, asks the backend and parses the reply, retrying parse
// failures up to request.retries times. Throws DesignerExhausted after the
// last failed attempt; TransportError propagates immediately.
DesignOutcome Design(const Backend& backend, const DesignRequest& request);

}  // namespace revo::designer

#endif  // REVO_DESIGNER_DESIGNER_H_
