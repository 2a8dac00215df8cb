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

#include "revo/designer/llm_backend.h"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <regex>

#include "httplib.h"

namespace revo::designer {

struct LlmBackend::Impl {
  std::string host;  // scheme://host:port
  std::string path;
  std::mutex mu;
  std::condition_variable cv;
  int in_flight = 0;
};

nlohmann::json LlmConfigToJson(const LlmConfig& c) {
  return {{"url", c.url},
          {"model", c.model},
          {"token_env", c.token_env},
          {"timeout_seconds", c.timeout_seconds},
          {"temperature_init", c.temperature_init},
          {"temperature_operator", c.temperature_operator},
          {"max_in_flight", c.max_in_flight}};
}

LlmConfig LlmConfigFromJson(const nlohmann::json& j) {
  LlmConfig c;
  if (!j.is_object()) throw ConfigError("llm config must be an object");
  nlohmann::json defaults = LlmConfigToJson(c);
  for (const auto& [key, _] : j.items())
    if (!defaults.contains(key)) throw ConfigError("unknown llm field: " + key);
  try {
    c.url = j.value("url", c.url);
    c.model = j.value("model", c.model);
    c.token_env = j.value("token_env", c.token_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.temperature_init = j.value("temperature_init", c.temperature_init);
    c.temperature_operator = j.value("temperature_operator", c.temperature_operator);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("llm config: ") + e.what());
  }
  if (c.max_in_flight < 1) throw ConfigError("llm max_in_flight must be >= 1");
  if (!(c.timeout_seconds > 0.0)) throw ConfigError("llm timeout_seconds must be positive");
  return c;
}

nlohmann::json BuildChatRequest(const LlmConfig& config, const DesignRequest& request,
                                const Prompt& prompt) {
  double temperature =
      request.op == Operator::kInit ? config.temperature_init : config.temperature_operator;
  return {{"model", config.model},
          {"temperature", temperature},
          {"messages",
           {{{"role", "system"}, {"content", prompt.system}},
            {{"role", "user"}, {"content", prompt.user}}}}};
}

std::string ParseChatResponse(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DesignerParseError(DesignerParseError::Reason::kNoCodeBlock,
                             std::string("malformed chat response: ") + e.what());
  }
}

LlmBackend::LlmBackend(LlmConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  static const std::regex kUrl(R"((http://[^/]+)(/.*)?)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, kUrl))
    throw ConfigError("llm url must be http://host[:port]/path (no TLS support): " + config_.url);
  impl_->host = m[1].str();
  impl_->path = m[2].matched ? m[2].str() : "/";
}

LlmBackend::~LlmBackend() = default;

std::string LlmBackend::Complete(const DesignRequest& request, const Prompt& prompt, int) const {
  {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait(lock, [&] { return impl_->in_flight < config_.max_in_flight; });
    ++impl_->in_flight;
  }
  struct Release {
    Impl* impl;
    ~Release() {
      std::lock_guard lock(impl->mu);
      --impl->in_flight;
      impl->cv.notify_one();
    }
  } release{impl_.get()};

  httplib::Client client(impl_->host);
  auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);
  auto result = client.Post(impl_->path, headers, BuildChatRequest(config_, request, prompt).dump(),
                            "application/json");
  if (!result)
    throw TransportError("llm endpoint " + config_.url + ": " + httplib::to_string(result.error()));
  if (result->status < 200 || result->status >= 300)
    throw TransportError("llm endpoint " + config_.url + " returned HTTP " +
                         std::to_string(result->status));
  return ParseChatResponse(result->body);
}

}  // namespace revo::designer
