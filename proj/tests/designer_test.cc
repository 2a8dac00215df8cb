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

#include <cstdlib>
#include <filesystem>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "program_gen.h"
#include "revo/common/resources.h"
#include "revo/designer/designer.h"
#include "revo/designer/llm_backend.h"
#include "revo/designer/mock_backend.h"
#include "revo/dsl/diff.h"
#include "revo/dsl/parser.h"
#include "revo/dsl/validate.h"
#include "revo/envs/env.h"
#include "revo/fitness/feedback.h"

namespace revo::designer {
namespace {

dsl::RewardProgram Hed() {
  return dsl::Parse(
      ReadFile(std::filesystem::path(REVO_SOURCE_DIR) / "fixtures/rewards/drive_hed.dsl"));
}

DesignRequest Request(Operator op, const std::string& task, std::vector<ParentInfo> parents = {}) {
  DesignRequest r;
  r.op = op;
  r.task = task;
  r.schema = envs::TaskSchema(task);
  r.parents = std::move(parents);
  return r;
}

ParentInfo Parent(dsl::RewardProgram p, std::string feedback = "", double sigma = 0.5) {
  ParentInfo info;
  info.id = "x";
  info.program = std::move(p);
  info.sigma = sigma;
  info.feedback = std::move(feedback);
  return info;
}

// Component expressions with params replaced by their values.
std::vector<dsl::Expr> Inlined(const dsl::RewardProgram& p) {
  std::vector<dsl::Expr> out;
  for (const auto& c : p.components)
    out.push_back(dsl::RewriteExpr(c.expr, [&](const dsl::Node& n) -> dsl::Expr {
      return n.kind == dsl::NodeKind::kParam ? dsl::MakeConstant(p.FindParam(n.name)->value)
                                             : nullptr;
    }));
  return out;
}

bool ContainsExpr(const std::vector<dsl::Expr>& set, const dsl::Expr& e) {
  for (const auto& x : set)
    if (dsl::ExprEqual(x, e)) return true;
  return false;
}

TEST_CASE("operators and request shape") {
  for (Operator op : {Operator::kInit, Operator::kMutate, Operator::kCrossover})
    CHECK(ParseOperator(OperatorName(op)) == op);
  CHECK_THROWS_AS(ParseOperator("splice"), ConfigError);
  CHECK_NOTHROW(CheckRequest(Request(Operator::kInit, "drive")));
  CHECK_THROWS_AS(CheckRequest(Request(Operator::kMutate, "drive")), std::invalid_argument);
  CHECK_THROWS_AS(CheckRequest(Request(Operator::kCrossover, "drive", {Parent(Hed())})),
                  std::invalid_argument);
  CHECK_THROWS_AS(CheckRequest(Request(Operator::kInit, "drive", {Parent(Hed())})),
                  std::invalid_argument);
  DesignRequest r = Request(Operator::kInit, "drive");
  r.retries = 0;
  CHECK_THROWS_AS(CheckRequest(r), std::invalid_argument);
}

TEST_CASE("prompt rendering") {
  SUBCASE("init") {
    Prompt p = RenderPrompt(Request(Operator::kInit, "drive"));
    CHECK(p.system.find(TaskDescription("drive")) != std::string::npos);
    CHECK(TaskDescription("drive").find("200 steps") != std::string::npos);
    for (const auto& v : envs::TaskSchema("drive").variables())
      CHECK(p.system.find(v.name) != std::string::npos);
    CHECK(p.system.find("clip(x, lo, hi)") != std::string::npos);
    CHECK(p.Text().find("Reward function") == std::string::npos);
    CHECK(p.Text().find("{{") == std::string::npos);
  }
  SUBCASE("mutate carries feedback, fitness and statistics") {
    ParentInfo parent = Parent(Hed(), fitness::ComposeFeedback({"smooth steering: negative"}), 0.375);
    parent.statistics["pos"] = {{0.5, 0.75, 1.0}};
    DesignRequest r = Request(Operator::kMutate, "drive", {parent});
    Prompt p = RenderPrompt(r);
    CHECK(p.user.find("Negative: smooth steering.") != std::string::npos);
    CHECK(p.user.find("fitness 0.375") != std::string::npos);
    CHECK(p.user.find("component smoothness = ") != std::string::npos);
    CHECK(p.user.find("pos: min [0.5], mean [0.75], max [1]") != std::string::npos);
    CHECK(p.user.find("exactly one component") != std::string::npos);
    r.include_statistics = false;
    CHECK(RenderPrompt(r).user.find("pos: min") == std::string::npos);
  }
  SUBCASE("crossover shows both parents") {
    Prompt p = RenderPrompt(Request(Operator::kCrossover, "latch",
                                    {Parent(Hed(), "Positive: lane keeping."), Parent(Hed())}));
    CHECK(p.user.find("Reward function A") != std::string::npos);
    CHECK(p.user.find("Reward function B") != std::string::npos);
    CHECK(p.user.find("combines the strongest components") != std::string::npos);
    CHECK(p.system.find(TaskDescription("latch")) != std::string::npos);
  }
  CHECK(FillTemplate("a {{x}} b", {{"x", "1"}}) == "a 1 b");
  CHECK_THROWS_AS(FillTemplate("a {{y}}", {{"x", "1"}}), ConfigError);
  for (const char* task : {"drive", "strider", "latch"}) CHECK(!TaskDescription(task).empty());
  CHECK_THROWS_AS(TaskDescription("chess"), ConfigError);
}

TEST_CASE("response parsing") {
  const auto& schema = envs::TaskSchema("drive");
  auto ok = ParseDesignerResponse("Sure.\n```dsl\ncomponent s = speed\n```\nmore", schema);
  CHECK(ok.components.size() == 1);
  auto reason = [&](const std::string& text) {
    try {
      ParseDesignerResponse(text, schema);
    } catch (const DesignerParseError& e) {
      return e.reason();
    }
    FAIL("expected DesignerParseError");
    return DesignerParseError::Reason::kNoCodeBlock;
  };
  CHECK(reason("Just reward going fast.") == DesignerParseError::Reason::kNoCodeBlock);
  CHECK(reason("```dsl\ncomponent a = \n```") == DesignerParseError::Reason::kSyntax);
  CHECK(reason("```\ncomponent a = altitude\n```") == DesignerParseError::Reason::kValidation);
  CHECK(ExtractCodeBlock("```python\nx\n```\n```dsl\ny\n```") == "x\n");
  CHECK_FALSE(ExtractCodeBlock("```dsl\nunterminated"));
}

TEST_CASE("template libraries") {
  for (const char* task : {"drive", "strider", "latch"}) {
    const TemplateLibrary& lib = LoadTemplateLibrary(task);
    CHECK(lib.templates.size() >= 12);
    auto vocab = fitness::LoadTagVocabulary(task);
    for (const auto& t : lib.templates) CHECK(vocab.Contains(t.aspect));
    for (const auto& [aspect, vars] : lib.aspect_variables) {
      CHECK(vocab.Contains(aspect));
      for (const auto& v : vars) CHECK(envs::TaskSchema(task).Find(v));
    }
  }
  CHECK_THROWS_AS(LoadTemplateLibrary("chess"), ConfigError);
  CHECK(NegativeAspects("Positive: a. Negative: lane keeping, smooth steering.") ==
        std::vector<std::string>{"lane keeping", "smooth steering"});
  CHECK(NegativeAspects("Positive: a.").empty());
}

TEST_CASE("mock is deterministic given seed and request") {
  MockBackend mock({7, 0.0});
  DesignRequest r = Request(Operator::kInit, "drive");
  Prompt p = RenderPrompt(r);
  CHECK(mock.Complete(r, p, 0) == mock.Complete(r, p, 0));
  CHECK(MockBackend({7, 0.0}).Complete(r, p, 0) == mock.Complete(r, p, 0));
  CHECK(MockBackend({8, 0.0}).Complete(r, p, 0) != mock.Complete(r, p, 0));
  DesignRequest other = r;
  other.nonce = 1;
  CHECK(mock.Complete(other, p, 0) != mock.Complete(r, p, 0));
  CHECK(mock.Complete(r, p, 1) != mock.Complete(r, p, 0));
}

TEST_CASE("mock designs are admissible") {
  for (const char* task : {"drive", "strider", "latch"}) {
    MockBackend mock({3, 0.0});
    for (uint64_t n = 0; n < 100; ++n) {
      DesignRequest r = Request(Operator::kInit, task);
      r.nonce = n;
      DesignOutcome out = Design(mock, r);
      CHECK(out.attempts == 1);
      CHECK(dsl::Validate(out.program, r.schema).ok());
      CHECK(out.program.components.size() >= 3);
      CHECK(out.program.components.size() <= 5);
    }
  }
}

// Mutation locality over chains of mutations from random and fixture parents.
TEST_CASE("mock mutation changes exactly one component") {
  const char* tasks[] = {"drive", "strider", "latch"};
  MockBackend mock({11, 0.0});
  int cases = 0;
  for (uint64_t chain = 0; chain < 60; ++chain) {
    const char* task = tasks[chain % 3];
    DesignRequest init = Request(Operator::kInit, task);
    init.nonce = chain;
    dsl::RewardProgram current =
        chain % 6 == 0 ? Hed() : Design(mock, init).program;
    if (chain % 6 == 0) task = "drive";
    for (int step = 0; step < 17; ++step) {
      DesignRequest r = Request(Operator::kMutate, task, {Parent(current)});
      r.nonce = step;
      dsl::RewardProgram child = Design(mock, r).program;
      dsl::ComponentDiff d = dsl::DiffComponents(current, child);
      REQUIRE_MESSAGE(d.ChangeCount() == 1, dsl::Render(current), "\n---\n", dsl::Render(child));
      current = child;
      ++cases;
    }
  }
  CHECK(cases >= 1000);
}

TEST_CASE("negative feedback steers mutation") {
  MockBackend mock({5, 0.0});
  int hit_plain = 0, hit_blamed = 0;
  for (uint64_t n = 0; n < 400; ++n) {
    for (bool blamed : {false, true}) {
      DesignRequest r = Request(Operator::kMutate, "drive",
                                {Parent(Hed(), blamed ? "Negative: smooth steering." : "")});
      r.nonce = n;
      dsl::ComponentDiff d = dsl::DiffComponents(Hed(), Design(mock, r).program);
      bool touched = std::count(d.modified.begin(), d.modified.end(), "smoothness") ||
                     std::count(d.removed.begin(), d.removed.end(), "smoothness");
      (blamed ? hit_blamed : hit_plain) += touched;
    }
  }
  // Weight 3 of 6 versus 1 of 4: expected shares 0.5 and 0.25 of the
  // modify/remove outcomes.
  CHECK(hit_blamed > hit_plain + 40);
}

TEST_CASE("mock crossover draws only from its parents") {
  MockBackend mock({13, 0.0});
  const char* tasks[] = {"drive", "strider", "latch"};
  for (uint64_t n = 0; n < 1000; ++n) {
    const char* task = tasks[n % 3];
    DesignRequest ia = Request(Operator::kInit, task), ib = ia;
    ia.nonce = 2 * n;
    ib.nonce = 2 * n + 1;
    dsl::RewardProgram a = n % 7 == 0 && n % 3 == 0 ? Hed() : Design(mock, ia).program;
    dsl::RewardProgram b = Design(mock, ib).program;
    DesignRequest r = Request(Operator::kCrossover, task, {Parent(a), Parent(b)});
    r.nonce = n;
    dsl::RewardProgram child = Design(mock, r).program;
    auto ea = Inlined(a), eb = Inlined(b), ec = Inlined(child);
    int from_a = 0, from_b = 0;
    for (const auto& e : ec) {
      bool in_a = ContainsExpr(ea, e), in_b = ContainsExpr(eb, e);
      REQUIRE((in_a || in_b));
      from_a += in_a;
      from_b += in_b;
    }
    CHECK(from_a >= 1);
    CHECK(from_b >= 1);
    CHECK(child.combiner == std::nullopt);
  }
}

TEST_CASE("retries and exhaustion") {
  DesignRequest r = Request(Operator::kInit, "strider");
  CHECK_THROWS_AS(Design(MockBackend({1, 1.0}), r), DesignerExhausted);
  try {
    Design(MockBackend({1, 1.0}), r);
  } catch (const DesignerExhausted& e) {
    CHECK(e.attempts() == 3);
  }
  int retried = 0, exhausted = 0;
  for (uint64_t n = 0; n < 200; ++n) {
    r.nonce = n;
    try {
      retried += Design(MockBackend({1, 0.5}), r).attempts > 1;
    } catch (const DesignerExhausted&) {
      ++exhausted;
    }
  }
  CHECK(retried > 50);
  CHECK(exhausted > 5);
  CHECK(exhausted < 50);
}

class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      res.status = status;
      res.set_content(reply, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  int status = 200;
  std::string reply;
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string ChatReply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

TEST_CASE("llm backend wire format") {
  StubServer stub;
  stub.reply = ChatReply("```dsl\ncomponent go = speed\n```");
  LlmConfig config;
  config.url = stub.url();
  config.model = "test-model";
  config.timeout_seconds = 5;
  config.token_env = "REVO_TEST_TOKEN";
  ::setenv("REVO_TEST_TOKEN", "secret", 1);
  LlmBackend llm(config);
  DesignRequest r = Request(Operator::kInit, "drive");
  DesignOutcome out = Design(llm, r);
  CHECK(out.program.components[0].name == "go");
  auto body = nlohmann::json::parse(stub.last_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == 1.0);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["role"] == "user");
  CHECK(body["messages"][0]["content"] == RenderPrompt(r).system);
  CHECK(stub.last_auth == "Bearer secret");
  ::unsetenv("REVO_TEST_TOKEN");

  r = Request(Operator::kMutate, "drive", {Parent(Hed())});
  Design(llm, r);
  CHECK(nlohmann::json::parse(stub.last_body)["temperature"] == 0.7);
  CHECK(stub.last_auth.empty());

  stub.reply = "not json";
  CHECK_THROWS_AS(Design(llm, r), DesignerExhausted);
  stub.reply = ChatReply("no code here");
  CHECK_THROWS_AS(Design(llm, r), DesignerExhausted);
  stub.status = 500;
  CHECK_THROWS_AS(Design(llm, r), TransportError);
}

TEST_CASE("llm backend configuration and reachability") {
  CHECK_THROWS_AS(LlmBackend(LlmConfig{.url = "https://api.example.com/v1/chat"}), ConfigError);
  CHECK_THROWS_AS(LlmConfigFromJson({{"endpoint", "x"}}), ConfigError);
  LlmConfig c = LlmConfigFromJson({{"url", "http://127.0.0.1:1/v1/chat/completions"},
                                   {"timeout_seconds", 1.0}});
  CHECK(LlmConfigToJson(LlmConfigFromJson(LlmConfigToJson(c))) == LlmConfigToJson(c));
  LlmBackend dead(c);
  CHECK_THROWS_AS(Design(dead, Request(Operator::kInit, "drive")), TransportError);
}

}  // namespace
}  // namespace revo::designer
