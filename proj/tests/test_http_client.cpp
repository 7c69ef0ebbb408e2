#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "prmforge/errors.hpp"
#include "prmforge/http_client.hpp"

using namespace prmforge;
using nlohmann::json;

namespace {

std::string chat_body(const std::vector<std::string>& contents) {
  json choices = json::array();
  for (const auto& c : contents) {
    choices.push_back({{"message", {{"role", "assistant"}, {"content", c}}}});
  }
  return json{{"choices", choices}}.dump();
}

// Scripted transport: a queue of responses, plus instrumentation for
// concurrency and request inspection.
class FakeTransport : public Transport {
 public:
  std::vector<HttpResponse> responses;
  std::vector<std::string> bodies;
  std::vector<std::string> urls;
  std::vector<std::map<std::string, std::string>> headers_seen;
  std::function<void()> on_post;

  HttpResponse post(const std::string& url, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    std::unique_lock lock(mu_);
    urls.push_back(url);
    bodies.push_back(body);
    headers_seen.push_back(headers);
    HttpResponse r = next_ < responses.size() ? responses[next_++] : responses.back();
    lock.unlock();
    if (on_post) on_post();
    return r;
  }

 private:
  std::mutex mu_;
  std::size_t next_ = 0;
};

BackendConfig quick_config() {
  BackendConfig config;
  config.endpoint = "http://example.test/v1";
  config.model_name = "test-model";
  config.retry.backoff = {};  // no sleeping in tests
  return config;
}

}  // namespace

TEST_CASE("complete posts an OpenAI-style request and returns n texts") {
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{200, chat_body({"first", "second"}), ""}};

  ChatClient client(quick_config(), std::move(transport));
  GenParams params;
  params.n = 2;
  params.temperature = 0.7;
  auto texts = client.complete("prompt text", params);
  REQUIRE(texts.size() == 2);
  CHECK(texts[0] == "first");

  CHECK(t->urls.at(0) == "http://example.test/v1/chat/completions");
  json request = json::parse(t->bodies.at(0));
  CHECK(request.at("model") == "test-model");
  CHECK(request.at("n") == 2);
  CHECK(request.at("temperature") == doctest::Approx(0.7));
  CHECK(request.at("messages").at(0).at("content") == "prompt text");
}

TEST_CASE("bearer auth comes from the environment") {
  ::setenv("PRMFORGE_API_KEY", "sk-test-123", 1);
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{200, chat_body({"ok"}), ""}};
  ChatClient client(quick_config(), std::move(transport));
  client.complete("p", {});
  CHECK(t->headers_seen.at(0).at("Authorization") == "Bearer sk-test-123");
  ::unsetenv("PRMFORGE_API_KEY");
}

TEST_CASE("retryable failures are retried up to max_attempts") {
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{500, "oops", ""}, {429, "slow down", ""}, {200, chat_body({"ok"}), ""}};
  ChatClient client(quick_config(), std::move(transport));
  CHECK(client.complete("p", {}).at(0) == "ok");
  CHECK(t->bodies.size() == 3);
}

TEST_CASE("a transport failure surfaces as a backend error after retries") {
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{0, "", "connection refused"}};
  ChatClient client(quick_config(), std::move(transport));
  try {
    client.complete("p", {});
    FAIL("expected a backend error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Backend);
  }
  CHECK(t->bodies.size() == 3);  // default max_attempts
}

TEST_CASE("non-retryable HTTP errors fail immediately") {
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{401, "unauthorized", ""}};
  ChatClient client(quick_config(), std::move(transport));
  try {
    client.complete("p", {});
    FAIL("expected a protocol error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Protocol);
  }
  CHECK(t->bodies.size() == 1);
}

TEST_CASE("protocol violations in the body raise protocol errors") {
  auto check_body = [](const std::string& body) {
    auto transport = std::make_unique<FakeTransport>();
    transport->responses = {{200, body, ""}};
    ChatClient client(quick_config(), std::move(transport));
    CHECK_THROWS_AS(client.complete("p", {}), Error);
  };
  check_body("not json");
  check_body(R"({"no_choices":true})");
  check_body(R"({"choices":[{"message":{}}]})");
  // wrong choice count for n=1
  check_body(chat_body({"a", "b"}));
}

TEST_CASE("score_steps parses a float-array reply and checks its length") {
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{200, chat_body({"[0.9, 0.4]"}), ""}};
  ChatClient client(quick_config(), std::move(transport));
  auto scores = client.score_steps("problem", {"s1", "s2"});
  REQUIRE(scores.size() == 2);
  CHECK(scores[1] == doctest::Approx(0.4));
  json request = json::parse(t->bodies.at(0));
  json payload = json::parse(request.at("messages").at(0).at("content").get<std::string>());
  CHECK(payload.at("problem") == "problem");
  CHECK(payload.at("steps").size() == 2);
}

TEST_CASE("score_steps rejects wrong-length and non-numeric replies") {
  auto check_reply = [](const std::string& content) {
    auto transport = std::make_unique<FakeTransport>();
    transport->responses = {{200, chat_body({content}), ""}};
    ChatClient client(quick_config(), std::move(transport));
    CHECK_THROWS_AS(client.score_steps("p", {"s1", "s2"}), Error);
  };
  check_reply("[0.9]");
  check_reply("[0.9, \"high\"]");
  check_reply("not an array");
}

TEST_CASE("judge returns the raw reply text") {
  auto transport = std::make_unique<FakeTransport>();
  transport->responses = {{200, chat_body({"<analysis_1>x</analysis_1>"}), ""}};
  ChatClient client(quick_config(), std::move(transport));
  CHECK(client.judge("prompt") == "<analysis_1>x</analysis_1>");
}

TEST_CASE("in-flight requests never exceed max_concurrency") {
  auto transport = std::make_unique<FakeTransport>();
  FakeTransport* t = transport.get();
  t->responses = {{200, chat_body({"ok"}), ""}};

  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  t->on_post = [&] {
    int now = ++in_flight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
  };

  BackendConfig config = quick_config();
  config.max_concurrency = 2;
  ChatClient client(config, std::move(transport));

  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] { client.complete("p", {}); });
  }
  for (auto& th : threads) th.join();
  CHECK(peak.load() <= 2);
  CHECK(t->bodies.size() == 8);
}

TEST_CASE("client validates its inputs") {
  auto make = [] {
    auto transport = std::make_unique<FakeTransport>();
    transport->responses = {{200, chat_body({"ok"}), ""}};
    return ChatClient(quick_config(), std::move(transport));
  };
  ChatClient client = make();
  CHECK_THROWS_AS(client.complete("", {}), Error);
  CHECK_THROWS_AS(client.judge(""), Error);
  CHECK_THROWS_AS(client.score_steps("p", {}), Error);

  BackendConfig bad = quick_config();
  bad.max_concurrency = 0;
  CHECK_THROWS_AS(ChatClient(bad, std::make_unique<FakeTransport>()), Error);
}
