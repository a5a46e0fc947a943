// Copyright (C) 2026 The f2f Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "f2f/error.hpp"
#include "f2f/hash.hpp"
#include "f2f/prompts.hpp"
#include "f2f/reply_parser.hpp"
#include "f2f/vlm.hpp"
#include "support/reply_cases.hpp"

using namespace f2f;

namespace {

VlmConfig fast_config(int retries = 3) {
  VlmConfig c;
  c.retries = retries;
  c.backoff_initial = std::chrono::milliseconds(1);
  c.backoff_max = std::chrono::milliseconds(4);
  c.api_key_env = "F2F_TEST_VLM_KEY";
  return c;
}

std::vector<VlmMessage> one_message(const std::string& text) { return {VlmMessage{Role::user, {VlmPart::text(text)}}}; }

// Counts peak concurrency inside complete().
class SlowAdapter : public VlmAdapter {
 public:
  std::string id() const override { return "slow"; }
  std::string complete(std::span<const VlmMessage>, const VlmConfig&) override {
    const int now = ++active_;
    int prev = peak_.load();
    while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(15));
    --active_;
    return "ok";
  }
  std::atomic<int> active_{0};
  std::atomic<int> peak_{0};
};

}  // namespace

TEST_SUITE("vlm") {
  TEST_CASE("reply parser labeled fixture") {
    int correct = 0;
    for (const auto& c : f2f::testing::kReplyCases) {
      CAPTURE(c.reply);
      int got = -1;
      try {
        got = parse_selection_reply(c.reply, c.n);
      } catch (const SelectionParseError&) {
        got = -1;
      }
      CHECK(got == c.expected);
      correct += got == c.expected;
    }
    CHECK(correct == static_cast<int>(std::size(f2f::testing::kReplyCases)));
    CHECK_THROWS_AS(parse_selection_reply("The selected edit is:1", 0), InvalidArgument);
  }

  TEST_CASE("prompt templates are pinned") {
    CHECK(sha256_hex(prompts::caption_template()) ==
          "1e5e9c4451aad21d9364d49f3b1dc8ff0c713a01f491b30595e30e29ca5a99e7");
    CHECK(sha256_hex(prompts::selection_template()) ==
          "c20b4149446fed4378aed8cb00ee363acbb8c7964f55243e8e2c34ff91d8b0c5");
    const auto cap = prompts::caption_instruction("a red apple");
    CHECK(cap.find("into a scene of a \"a red apple\",") != std::string::npos);
    CHECK(cap.find("CAPTION") == std::string::npos);
    const auto sel = prompts::selection_instruction("a red apple");
    CHECK(sel.find("collage of 12 edited") != std::string::npos);
    CHECK(sel.find("from 1 to 12") != std::string::npos);
    CHECK(sel.find("\"a red apple\"") != std::string::npos);
    const auto sel5 = prompts::selection_instruction("x", 5);
    CHECK(sel5.find("collage of 5 edited") != std::string::npos);
    CHECK(sel5.find("from 1 to 5") != std::string::npos);
    CHECK(sel5.find("12") == std::string::npos);
  }

  TEST_CASE("gateway retries retryable failures then succeeds") {
    auto adapter = std::make_shared<ScriptedVlm>(
        std::vector<ScriptedVlm::Step>{{"", 429}, {"", 503}, {"fine", 0}});
    VlmGateway gw(adapter, fast_config());
    std::vector<Json> log;
    const auto r = gw.chat_detailed(one_message("hi"), [&](const Json& j) { log.push_back(j); });
    CHECK(r.text == "fine");
    CHECK(r.attempts == 3);
    CHECK(adapter->calls() == 3);
    REQUIRE(log.size() == 1);
    CHECK(log[0]["attempts"].size() == 3);
    CHECK(log[0]["retries"] == 2);
  }

  TEST_CASE("gateway retries empty replies") {
    auto adapter = ScriptedVlm::replies({"   ", "ok"});
    VlmGateway gw(adapter, fast_config());
    CHECK(gw.chat(one_message("hi")) == "ok");
    CHECK(adapter->calls() == 2);
  }

  TEST_CASE("gateway gives up after the retry budget") {
    auto adapter = std::make_shared<ScriptedVlm>(
        std::vector<ScriptedVlm::Step>{{"", 500}, {"", 502}, {"", 429}, {"never", 0}});
    VlmGateway gw(adapter, fast_config(2));
    try {
      gw.chat(one_message("hi"));
      FAIL("expected RetriesExhausted");
    } catch (const RetriesExhausted& e) {
      CHECK(e.attempts() == 3);
      CHECK(e.status() == 429);
    }
    CHECK(adapter->calls() == 3);
  }

  TEST_CASE("fatal failures are not retried") {
    auto adapter = std::make_shared<ScriptedVlm>(std::vector<ScriptedVlm::Step>{{"", 401}, {"late", 0}});
    VlmGateway gw(adapter, fast_config());
    CHECK_THROWS_AS(gw.chat(one_message("hi")), FatalError);
    CHECK(adapter->calls() == 1);
  }

  TEST_CASE("api key is redacted from transcripts and errors") {
    ::setenv("F2F_TEST_VLM_KEY", "sk-very-secret-123", 1);
    auto adapter = std::make_shared<ScriptedVlm>(
        std::vector<ScriptedVlm::Step>{{"echo sk-very-secret-123", 0}});
    VlmGateway gw(adapter, fast_config());
    std::string logged;
    gw.chat(one_message("hi"), [&](const Json& j) { logged = j.dump(); });
    CHECK(logged.find("sk-very-secret-123") == std::string::npos);
    CHECK(logged.find("[REDACTED]") != std::string::npos);
    ::unsetenv("F2F_TEST_VLM_KEY");
  }

  TEST_CASE("gateway bounds concurrency") {
    auto adapter = std::make_shared<SlowAdapter>();
    auto cfg = fast_config();
    cfg.max_concurrency = 2;
    VlmGateway gw(adapter, cfg);
    {
      std::vector<std::jthread> ts;
      for (int i = 0; i < 8; ++i) ts.emplace_back([&] { gw.chat(one_message("x")); });
    }
    CHECK(adapter->peak_.load() <= 2);
    CHECK(adapter->peak_.load() >= 1);
  }

  TEST_CASE("invalid config and messages are rejected") {
    auto cfg = fast_config();
    cfg.max_concurrency = 0;
    CHECK_THROWS_AS(VlmGateway(ScriptedVlm::replies({}), cfg), InvalidArgument);
    VlmGateway gw(ScriptedVlm::replies({"x"}), fast_config());
    CHECK_THROWS_AS(gw.chat({}), InvalidArgument);
    std::vector<VlmMessage> empty_parts{VlmMessage{Role::user, {}}};
    CHECK_THROWS_AS(gw.chat(empty_parts), InvalidArgument);
  }

  TEST_CASE("openai request body layout") {
    Image img(4, 4, Rgb{1, 2, 3});
    std::vector<VlmMessage> msgs{
        {Role::user, {VlmPart::image(img), VlmPart::text("describe")}},
        {Role::assistant, {VlmPart::text("a thing")}},
        {Role::user, {VlmPart::text("again")}},
    };
    auto cfg = fast_config();
    cfg.model_id = "m-1";
    cfg.temperature = 0.0;
    cfg.max_output_tokens = 77;
    const auto body = OpenAiChatAdapter::request_body(msgs, cfg);
    CHECK(body["model"] == "m-1");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["max_tokens"] == 77);
    REQUIRE(body["messages"].size() == 3);
    const auto& first = body["messages"][0];
    CHECK(first["role"] == "user");
    CHECK(first["content"][0]["type"] == "image_url");
    const std::string url = first["content"][0]["image_url"]["url"];
    CHECK(url.rfind("data:image/png;base64,", 0) == 0);
    CHECK(first["content"][1]["text"] == "describe");
    CHECK(body["messages"][1]["content"] == "a thing");
  }

  TEST_CASE("openai adapter against a local endpoint") {
    httplib::Server srv;
    std::atomic<int> hits{0};
    std::string seen_auth;
    srv.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      const int n = ++hits;
      seen_auth = req.get_header_value("Authorization");
      if (n == 1) {
        res.status = 503;
        return;
      }
      const auto j = Json::parse(req.body);
      res.set_content(Json{{"choices", {{{"message", {{"content", "reply to " + j["model"].get<std::string>()}}}}}}}
                          .dump(),
                      "application/json");
    });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::jthread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    ::setenv("F2F_TEST_VLM_KEY", "tok-abc", 1);
    auto cfg = fast_config();
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    cfg.model_id = "local";
    VlmGateway gw(std::make_shared<OpenAiChatAdapter>(), cfg);
    const auto r = gw.chat_detailed(one_message("hello"));
    CHECK(r.text == "reply to local");
    CHECK(r.attempts == 2);
    CHECK(seen_auth == "Bearer tok-abc");
    ::unsetenv("F2F_TEST_VLM_KEY");
    srv.stop();
  }

  TEST_CASE("unreachable endpoint exhausts retries") {
    auto cfg = fast_config(1);
    cfg.endpoint = "http://127.0.0.1:1/v1";
    cfg.timeout = std::chrono::milliseconds(500);
    VlmGateway gw(std::make_shared<OpenAiChatAdapter>(), cfg);
    CHECK_THROWS_AS(gw.chat(one_message("x")), RetriesExhausted);
  }

  TEST_CASE("rule based responder") {
    auto r = rule_based_responder(5);
    const auto sel = one_message(prompts::selection_instruction("a dog"));
    CHECK(r(sel) == "The selected edit is:5");
    const auto cap = one_message(prompts::caption_instruction("A red apple."));
    CHECK(r(cap) == "The scene very slowly and smoothly transforms into a red apple.");
  }
}
