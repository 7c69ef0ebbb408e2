#pragma once

/**
 * The three model roles the pipeline consumes: a completer (policy model),
 * a judge (critic LLM), and a step scorer (PRM). Deterministic mocks live in
 * mock.hpp; the OpenAI-compatible HTTP client in http_client.hpp.
 */

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prmforge {

struct GenParams {
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 2048;
  std::optional<std::uint64_t> seed;
  int n = 1;  // samples per call
};

struct RetryPolicy {
  int max_attempts = 3;
  std::vector<std::chrono::milliseconds> backoff = {
      std::chrono::milliseconds(250), std::chrono::milliseconds(1000)};
};

struct BackendConfig {
  std::string endpoint;
  std::string model_name;
  int max_concurrency = 4;
  RetryPolicy retry;
  std::chrono::milliseconds timeout = std::chrono::milliseconds(60000);
  double requests_per_second = 0;  // 0 = unlimited
};

class Completer {
 public:
  virtual ~Completer() = default;
  /// Exactly params.n completion texts for the given prefix.
  virtual std::vector<std::string> complete(const std::string& prefix,
                                            const GenParams& params) = 0;
};

class StepScorer {
 public:
  virtual ~StepScorer() = default;
  /// One score in [0,1] per step, in step order.
  virtual std::vector<double> score_steps(const std::string& problem,
                                          const std::vector<std::string>& steps) = 0;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  /// Raw model text, returned verbatim; parsing is the judge module's job.
  virtual std::string judge(const std::string& prompt) = 0;
};

}  // namespace prmforge
