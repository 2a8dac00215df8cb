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

#ifndef REVO_DESIGNER_LLM_BACKEND_H_
#define REVO_DESIGNER_LLM_BACKEND_H_

// Chat-completion client: POST {model, messages, temperature} and read
// choices[0].message.content. Plain HTTP only (the build links no TLS).

#include <memory>
#include <string>

#include "json.hpp"
#include "revo/designer/designer.h"

namespace revo::designer {

struct LlmConfig {
  std::string url = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model = "gpt-4-turbo";
  // Name of the environment variable holding the bearer token; unset or empty
  // sends no Authorization header.
  std::string token_env = "REVO_LLM_TOKEN";
  double timeout_seconds = 120.0;
  double temperature_init = 1.0;
  double temperature_operator = 0.7;
  int max_in_flight = 4;
};

nlohmann::json LlmConfigToJson(const LlmConfig& config);
// Throws ConfigError on unknown fields or wrong types.
LlmConfig LlmConfigFromJson(const nlohmann::json& j);

nlohmann::json BuildChatRequest(const LlmConfig& config, const DesignRequest& request,
                                const Prompt& prompt);

// Throws DesignerParseError(kNoCodeBlock) when the body lacks message content.
std::string ParseChatResponse(const std::string& body);

class LlmBackend : public Backend {
 public:
  // Throws ConfigError for unsupported URLs.
  explicit LlmBackend(LlmConfig config);
  ~LlmBackend() override;

  std::string kind() const override { return "llm"; }
  // Throws TransportError when the endpoint is unreachable or returns a
  // non-2xx status.
  std::string Complete(const DesignRequest& request, const Prompt& prompt,
                       int attempt) const override;

 private:
  struct Impl;
  LlmConfig config_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace revo::designer

#endif  // REVO_DESIGNER_LLM_BACKEND_H_
