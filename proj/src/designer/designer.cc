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

#include "revo/designer/designer.h"

#include <bit>
#include <stdexcept>

#include "revo/common/random.h"
#include "revo/common/resources.h"
#include "revo/dsl/parser.h"
#include "revo/dsl/validate.h"

namespace revo::designer {
namespace {

std::string Resource(std::string_view name) {
  return std::string(EmbeddedResource("prompts/v1/" + std::string(name)));
}

std::string Trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string RenderParent(const DesignRequest& request, const ParentInfo& parent,
                         const std::string& label) {
  std::string stats;
  if (request.include_statistics && !parent.statistics.empty()) {
    stats = FillTemplate(Resource("statistics.txt"),
                         {{"table", Trimmed(fitness::FormatStatistics(
                                        parent.statistics, parent.program.ComponentNames()))}});
  }
  return FillTemplate(Resource("parent.txt"),
                      {{"label", label},
                       {"sigma", dsl::FormatNumber(parent.sigma)},
                       {"program", Trimmed(dsl::Render(parent.program))},
                       {"feedback", parent.feedback.empty() ? "(none)" : parent.feedback},
                       {"statistics", stats}});
}

}  // namespace

std::string_view OperatorName(Operator op) {
  switch (op) {
    case Operator::kInit:
      return "init";
    case Operator::kMutate:
      return "mutate";
    case Operator::kCrossover:
      return "crossover";
  }
  return "?";
}

Operator ParseOperator(std::string_view name) {
  if (name == "init") return Operator::kInit;
  if (name == "mutate") return Operator::kMutate;
  if (name == "crossover") return Operator::kCrossover;
  throw ConfigError("unknown operator: " + std::string(name));
}

void CheckRequest(const DesignRequest& request) {
  size_t want = request.op == Operator::kInit ? 0 : request.op == Operator::kMutate ? 1 : 2;
  if (request.parents.size() != want)
    throw std::invalid_argument(std::string(OperatorName(request.op)) + " needs " +
                                std::to_string(want) + " parent(s), got " +
                                std::to_string(request.parents.size()));
  if (request.retries < 1) throw std::invalid_argument("retry budget must be >= 1");
}

uint64_t RequestFingerprint(const DesignRequest& request) {
  std::string text;
  text += OperatorName(request.op);
  text += '\0' + request.task + '\0' + request.task_description + '\0' + request.schema.name();
  for (const auto& p : request.parents) {
    text += '\0' + dsl::Render(p.program);
    text += '\0' + std::to_string(std::bit_cast<uint64_t>(p.sigma));
    text += '\0' + p.feedback;
    text += '\0' + fitness::StatisticsToJson(p.statistics).dump();
  }
  text += request.include_statistics ? "\1" : "\2";
  text += std::to_string(request.nonce);
  return Fnv1a64(text);
}

std::string TaskDescription(std::string_view task) {
  return Trimmed(Resource("tasks/" + std::string(task) + ".txt"));
}

std::string FillTemplate(std::string_view text, const std::map<std::string, std::string>& slots) {
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    std::string slot(text.substr(open + 2, close - open - 2));
    auto it = slots.find(slot);
    if (it == slots.end()) throw ConfigError("prompt template slot not provided: " + slot);
    out += it->second;
    pos = close + 2;
  }
  out.append(text.substr(pos));
  return out;
}

Prompt RenderPrompt(const DesignRequest& request) {
  CheckRequest(request);
  Prompt prompt;
  std::string description =
      request.task_description.empty() ? TaskDescription(request.task) : request.task_description;
  prompt.system =
      Trimmed(FillTemplate(Resource("system.txt"),
                           {{"task_description", description},
                            {"schema", Trimmed(request.schema.Describe())},
                            {"dsl_reference", Trimmed(Resource("dsl_reference.txt"))}}));
  switch (request.op) {
    case Operator::kInit:
      prompt.user = Trimmed(Resource("init.txt"));
      break;
    case Operator::kMutate:
      prompt.user = Trimmed(FillTemplate(
          Resource("mutate.txt"), {{"parents", Trimmed(RenderParent(request, request.parents[0], "P"))}}));
      break;
    case Operator::kCrossover:
      prompt.user = Trimmed(FillTemplate(
          Resource("crossover.txt"),
          {{"parents", Trimmed(RenderParent(request, request.parents[0], "A")) + "\n\n" +
                           Trimmed(RenderParent(request, request.parents[1], "B"))}}));
      break;
  }
  return prompt;
}

std::string_view ReasonName(DesignerParseError::Reason reason) {
  switch (reason) {
    case DesignerParseError::Reason::kNoCodeBlock:
      return "NoCodeBlock";
    case DesignerParseError::Reason::kSyntax:
      return "Syntax";
    case DesignerParseError::Reason::kValidation:
      return "Validation";
  }
  return "?";
}

DesignerParseError::DesignerParseError(Reason reason, const std::string& detail)
    : Error(std::string(ReasonName(reason)) + ": " + detail), reason_(reason) {}

std::optional<std::string> ExtractCodeBlock(std::string_view text) {
  size_t open = text.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  size_t body = text.find('\n', open + 3);
  if (body == std::string_view::npos) return std::nullopt;
  ++body;
  size_t close = text.find("```", body);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(body, close - body));
}

dsl::RewardProgram ParseDesignerResponse(std::string_view text, const dsl::EnvSchema& schema) {
  std::optional<std::string> block = ExtractCodeBlock(text);
  if (!block) throw DesignerParseError(DesignerParseError::Reason::kNoCodeBlock, "no fenced block");
  dsl::RewardProgram program;
  try {
    program = dsl::Parse(*block);
  } catch (const dsl::ParseError& e) {
    throw DesignerParseError(DesignerParseError::Reason::kSyntax, e.what());
  }
  dsl::ValidationReport report = dsl::Validate(program, schema);
  if (!report.ok())
    throw DesignerParseError(DesignerParseError::Reason::kValidation, report.Describe());
  return program;
}

DesignerExhausted::DesignerExhausted(int attempts, const std::string& last_error)
    : Error("designer gave no admissible program after " + std::to_string(attempts) +
            " attempt(s); last error: " + last_error),
      attempts_(attempts) {}

DesignOutcome Design(const Backend& backend, const DesignRequest& request) {
  Prompt prompt = RenderPrompt(request);
  std::string last;
  for (int attempt = 0; attempt < request.retries; ++attempt) {
    try {
      std::string reply = backend.Complete(request, prompt, attempt);
      return {ParseDesignerResponse(reply, request.schema), attempt + 1};
    } catch (const DesignerParseError& e) {
      last = e.what();
    }
  }
  throw DesignerExhausted(request.retries, last);
}

}  // namespace revo::designer
