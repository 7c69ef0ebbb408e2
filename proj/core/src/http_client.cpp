#include "prmforge/http_client.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "prmforge/errors.hpp"

namespace prmforge {

using json = nlohmann::json;

namespace {

class HttplibTransport : public Transport {
 public:
  explicit HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  HttpResponse post(const std::string& url, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    // split scheme://host[:port] from the path
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      return {0, "", "invalid endpoint URL: " + url};
    }
    auto path_start = url.find('/', scheme_end + 3);
    std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(base);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_read_timeout(secs.count(), 0);
    client.set_write_timeout(secs.count(), 0);
    client.set_connection_timeout(secs.count(), 0);

    httplib::Headers hdrs(headers.begin(), headers.end());
    auto res = client.Post(path, hdrs, body, "application/json");
    if (!res) {
      return {0, "", "transport error: " + httplib::to_string(res.error())};
    }
    return {res->status, res->body, ""};
  }

 private:
  std::chrono::milliseconds timeout_;
};

// Client-side token bucket, refilled on demand.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second) : rate_(requests_per_second) {}

  void acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lock(mu_);
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    last_refill_ = now;
    if (tokens_ < 1.0) {
      auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
      tokens_ = 1.0;
      last_refill_ = std::chrono::steady_clock::now();
    }
    tokens_ -= 1.0;
  }

 private:
  double rate_;
  double burst_ = 4.0;
  double tokens_ = 4.0;
  std::chrono::steady_clock::time_point last_refill_ = std::chrono::steady_clock::now();
  std::mutex mu_;
};

class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(int limit) : limit_(limit) {}

  void enter() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < limit_; });
    ++in_flight_;
  }
  void exit() {
    std::lock_guard lock(mu_);
    --in_flight_;
    cv_.notify_one();
  }

 private:
  int limit_;
  int in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

bool retryable(const HttpResponse& r) {
  return r.status == 0 || r.status == 429 || r.status >= 500;
}

}  // namespace

struct ChatClient::Impl {
  BackendConfig config;
  std::unique_ptr<Transport> transport;
  RateLimiter limiter;
  ConcurrencyGate gate;

  Impl(BackendConfig cfg, std::unique_ptr<Transport> t)
      : config(std::move(cfg)),
        transport(std::move(t)),
        limiter(config.requests_per_second),
        gate(config.max_concurrency) {}

  json post_chat(const json& request) {
    std::map<std::string, std::string> headers;
    if (const char* key = std::getenv("PRMFORGE_API_KEY")) {
      headers["Authorization"] = std::string("Bearer ") + key;
    }
    std::string url = config.endpoint + "/chat/completions";
    std::string body = request.dump();

    gate.enter();
    struct GateGuard {
      ConcurrencyGate& g;
      ~GateGuard() { g.exit(); }
    } guard{gate};

    HttpResponse last;
    int attempts = 0;
    for (; attempts < config.retry.max_attempts; ++attempts) {
      if (attempts > 0 && !config.retry.backoff.empty()) {
        std::size_t idx = std::min<std::size_t>(attempts - 1, config.retry.backoff.size() - 1);
        std::this_thread::sleep_for(config.retry.backoff[idx]);
      }
      limiter.acquire();
      last = transport->post(url, body, headers);
      if (!retryable(last)) break;
    }
    if (retryable(last)) {
      throw Error(ErrorKind::Backend,
                  "backend request failed after " + std::to_string(attempts) +
                      " attempts: " + (last.status ? "HTTP " + std::to_string(last.status)
                                                   : last.error));
    }
    if (last.status != 200) {
      throw Error(ErrorKind::Protocol, "unexpected HTTP status " + std::to_string(last.status) +
                                           ": " + last.body);
    }
    json parsed = json::parse(last.body, nullptr, false);
    if (parsed.is_discarded()) {
      throw Error(ErrorKind::Protocol, "malformed JSON in chat-completions response");
    }
    return parsed;
  }

  std::vector<std::string> chat_texts(const std::string& content, const GenParams& params) {
    json request = {
        {"model", config.model_name},
        {"messages", json::array({{{"role", "user"}, {"content", content}}})},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"n", params.n},
        {"max_tokens", params.max_tokens},
    };
    if (params.seed) request["seed"] = *params.seed;
    json response = post_chat(request);
    if (!response.contains("choices") || !response["choices"].is_array()) {
      throw Error(ErrorKind::Protocol, "chat-completions response missing choices");
    }
    std::vector<std::string> out;
    for (const auto& choice : response["choices"]) {
      if (!choice.contains("message") || !choice["message"].contains("content") ||
          !choice["message"]["content"].is_string()) {
        throw Error(ErrorKind::Protocol, "choice missing message.content");
      }
      out.push_back(choice["message"]["content"].get<std::string>());
    }
    if (static_cast<int>(out.size()) != params.n) {
      throw Error(ErrorKind::Protocol,
                  "expected " + std::to_string(params.n) + " choices, got " +
                      std::to_string(out.size()));
    }
    return out;
  }
};

ChatClient::ChatClient(BackendConfig config, std::unique_ptr<Transport> transport)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(transport))) {
  if (impl_->config.max_concurrency < 1) {
    throw Error(ErrorKind::Config, "max_concurrency must be >= 1");
  }
}

ChatClient::~ChatClient() = default;

std::vector<std::string> ChatClient::complete(const std::string& prefix,
                                              const GenParams& params) {
  if (prefix.empty()) {
    throw Error(ErrorKind::Precondition, "complete: prefix must be non-empty");
  }
  if (params.n < 1) {
    throw Error(ErrorKind::Precondition, "complete: n must be >= 1");
  }
  return impl_->chat_texts(prefix, params);
}

std::string ChatClient::judge(const std::string& prompt) {
  if (prompt.empty()) {
    throw Error(ErrorKind::Precondition, "judge: prompt must be non-empty");
  }
  GenParams params;
  params.temperature = 0.0;
  params.n = 1;
  return impl_->chat_texts(prompt, params).front();
}

std::vector<double> ChatClient::score_steps(const std::string& problem,
                                            const std::vector<std::string>& steps) {
  if (steps.empty()) {
    throw Error(ErrorKind::Precondition, "score_steps: steps must be non-empty");
  }
  json payload = {{"problem", problem}, {"steps", steps}};
  GenParams params;
  params.temperature = 0.0;
  params.n = 1;
  std::string content = impl_->chat_texts(payload.dump(), params).front();
  json scores = json::parse(content, nullptr, false);
  if (scores.is_discarded() || !scores.is_array()) {
    throw Error(ErrorKind::Protocol, "step scorer reply is not a JSON array of floats");
  }
  std::vector<double> out;
  for (const auto& v : scores) {
    if (!v.is_number()) {
      throw Error(ErrorKind::Protocol, "step scorer reply contains a non-numeric entry");
    }
    out.push_back(v.get<double>());
  }
  if (out.size() != steps.size()) {
    throw Error(ErrorKind::Protocol,
                "step scorer returned " + std::to_string(out.size()) + " scores for " +
                    std::to_string(steps.size()) + " steps");
  }
  return out;
}

std::unique_ptr<Transport> make_httplib_transport(std::chrono::milliseconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

}  // namespace prmforge
